#pragma once

#include <stdexcept>
#include <string>

namespace flexcross {

// One type per failure the callers are expected to tell apart.
// The CLI maps these onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SignatureError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };
struct NoCoefficientsError : Error { using Error::Error; };
struct NotSingleFamilyError : Error { using Error::Error; };
struct NoRealModulusError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct DegenerateAltitudeError : Error { using Error::Error; };
struct NotRealisableHereError : Error { using Error::Error; };

}  // namespace flexcross
