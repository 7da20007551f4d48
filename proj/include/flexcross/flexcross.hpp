#pragma once

#include "flexcross/errors.hpp"
#include "flexcross/geometry.hpp"
#include "flexcross/elliptic.hpp"
#include "flexcross/epbq.hpp"
#include "flexcross/butterfly.hpp"
#include "flexcross/flexbuild.hpp"
#include "flexcross/io.hpp"
