#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flexcross/errors.hpp"

namespace flexcross {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class SpaceKind { euclidean, spherical, hyperbolic };

inline const char* to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::euclidean: return "euclidean";
        case SpaceKind::spherical: return "spherical";
        case SpaceKind::hyperbolic: return "hyperbolic";
    }
    return "?";
}

struct AmbientSpace {
    SpaceKind kind = SpaceKind::spherical;
    int n = 3;

    int dim() const { return kind == SpaceKind::euclidean ? n : n + 1; }
    // +1 on the sphere, -1 on the hyperboloid; unused in the flat case
    double eps() const {
        return kind == SpaceKind::spherical ? 1.0 : kind == SpaceKind::hyperbolic ? -1.0 : 0.0;
    }
};

// Timelike coordinate is the last one.
inline double bilinear(const AmbientSpace& sp, const Vec& x, const Vec& y) {
    if (x.size() != sp.dim() || y.size() != sp.dim())
        throw ContractError("bilinear: dimension mismatch");
    double s = x.dot(y);
    if (sp.kind == SpaceKind::hyperbolic) {
        const auto l = x.size() - 1;
        s -= 2.0 * x[l] * y[l];
    }
    return s;
}

// How far x is from being a point of the model (0 for euclidean).
inline double model_residual(const AmbientSpace& sp, const Vec& x) {
    switch (sp.kind) {
        case SpaceKind::euclidean: return 0.0;
        case SpaceKind::spherical: return std::abs(bilinear(sp, x, x) - 1.0);
        case SpaceKind::hyperbolic: {
            if (!(x[x.size() - 1] > 0)) return INFINITY;
            return std::abs(bilinear(sp, x, x) + 1.0);
        }
    }
    return INFINITY;
}

inline constexpr double kModelTol = 1e-8;

// Chord forms of arccos / arccosh. Same value on model points, but short
// edges keep their digits.
inline double distance(const AmbientSpace& sp, const Vec& x, const Vec& y) {
    if (x.size() != sp.dim() || y.size() != sp.dim())
        throw ContractError("distance: dimension mismatch");
    if (sp.kind == SpaceKind::euclidean) return (x - y).norm();
    if (model_residual(sp, x) > kModelTol || model_residual(sp, y) > kModelTol)
        throw ContractError("distance: argument is not a model point");
    const Vec d = x - y;
    if (sp.kind == SpaceKind::spherical)
        return 2.0 * std::asin(std::clamp(d.norm() / 2.0, 0.0, 1.0));
    const double q = std::max(0.0, bilinear(sp, d, d));
    return 2.0 * std::asinh(std::sqrt(q) / 2.0);
}

enum class Signature { pos_def, pos_semidef_rank_n_minus_1, lorentzian };

struct GramFactor {
    std::vector<Vec> normals;
    Vec m;
};

inline constexpr double kEigenClip = 1e-12;

// Vectors n_1..n_n with (n_p, n_q) = G_pq, plus a unit vector m orthogonal
// to all of them. Ambient layout:
//   pos_def     R^{n+1}, normals in coords 0..n-1, m = e_n
//   semidef     R^n, normals in coords 0..n-2, m = e_{n-1}
//   lorentzian  R^{n,1}, spacelike part in 0..n-2, m = e_{n-1}, timelike last
inline GramFactor gram_factorize(const Mat& G, Signature sig) {
    const auto n = G.rows();
    if (G.cols() != n || n < 2) throw ContractError("gram_factorize: G must be square");
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    if (es.info() != Eigen::Success) throw SignatureError("gram_factorize: eigensolver failed");
    const Vec lam = es.eigenvalues();  // ascending
    const Mat& V = es.eigenvectors();
    const double top = std::max(std::abs(lam[0]), std::abs(lam[n - 1]));

    GramFactor out;
    auto place = [&](long dim, const std::vector<std::pair<long, long>>& slots, const std::vector<double>& scale) {
        out.normals.assign(n, Vec::Zero(dim));
        for (std::size_t s = 0; s < slots.size(); ++s)
            for (long p = 0; p < n; ++p)
                out.normals[p][slots[s].second] = V(p, slots[s].first) * scale[s];
    };

    switch (sig) {
        case Signature::pos_def: {
            if (lam[0] <= kEigenClip) throw SignatureError("gram_factorize: G is not positive definite");
            std::vector<std::pair<long, long>> slots;
            std::vector<double> sc;
            for (long i = 0; i < n; ++i) { slots.push_back({i, i}); sc.push_back(std::sqrt(lam[i])); }
            place(n + 1, slots, sc);
            out.m = Vec::Zero(n + 1);
            out.m[n] = 1.0;
            break;
        }
        case Signature::pos_semidef_rank_n_minus_1: {
            // the smallest eigenvalue is the null direction; it only has to be
            // small on the scale that classify uses for det G = 0
            if (std::abs(lam[0]) > 1e-9 * std::max(1.0, top) || lam[1] <= kEigenClip)
                throw SignatureError("gram_factorize: G is not positive semidefinite of rank n-1");
            std::vector<std::pair<long, long>> slots;
            std::vector<double> sc;
            for (long i = 1; i < n; ++i) { slots.push_back({i, i - 1}); sc.push_back(std::sqrt(lam[i])); }
            place(n, slots, sc);
            out.m = Vec::Zero(n);
            out.m[n - 1] = 1.0;
            break;
        }
        case Signature::lorentzian: {
            if (lam[0] >= -kEigenClip || lam[1] <= kEigenClip)
                throw SignatureError("gram_factorize: G does not have inertia (n-1, 1)");
            std::vector<std::pair<long, long>> slots;
            std::vector<double> sc;
            for (long i = 1; i < n; ++i) { slots.push_back({i, i - 1}); sc.push_back(std::sqrt(lam[i])); }
            slots.push_back({0, n});
            sc.push_back(std::sqrt(-lam[0]));
            place(n + 1, slots, sc);
            out.m = Vec::Zero(n + 1);
            out.m[n - 1] = 1.0;
            break;
        }
    }
    return out;
}

inline Mat gram_of(const AmbientSpace& sp, const std::vector<Vec>& v) {
    const auto n = static_cast<long>(v.size());
    Mat G(n, n);
    for (long p = 0; p < n; ++p)
        for (long q = 0; q < n; ++q) G(p, q) = bilinear(sp, v[p], v[q]);
    return G;
}

}  // namespace flexcross
