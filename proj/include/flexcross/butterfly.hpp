#pragma once

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "flexcross/epbq.hpp"
#include "flexcross/errors.hpp"
#include "flexcross/geometry.hpp"

namespace flexcross {

struct GHPair {
    int n = 0;
    Mat G, H;
};

inline void check_pair(const GHPair& x) {
    if (x.n < 3) throw SpecError("n must be at least 3");
    if (x.G.rows() != x.n || x.G.cols() != x.n || x.H.rows() != x.n || x.H.cols() != x.n)
        throw ContractError("GH pair: matrices must be n x n");
    for (int p = 0; p < x.n; ++p) {
        if (x.G(p, p) != 1.0 || x.H(p, p) != 1.0) throw ContractError("GH pair: diagonals must be 1");
        for (int q = 0; q < p; ++q)
            if (x.G(p, q) != x.G(q, p)) throw ContractError("GH pair: G must be symmetric");
    }
    if (!x.G.allFinite() || !x.H.allFinite()) throw ContractError("GH pair: non-finite entry");
}

enum class Kind { spherical, euclidean, hyperbolic, none };

inline const char* to_string(Kind k) {
    switch (k) {
        case Kind::spherical: return "spherical";
        case Kind::euclidean: return "euclidean";
        case Kind::hyperbolic: return "hyperbolic";
        case Kind::none: return "none";
    }
    return "?";
}

inline SpaceKind space_of(Kind k) {
    switch (k) {
        case Kind::spherical: return SpaceKind::spherical;
        case Kind::euclidean: return SpaceKind::euclidean;
        case Kind::hyperbolic: return SpaceKind::hyperbolic;
        case Kind::none: break;
    }
    throw ContractError("no ambient space for an unrealisable pair");
}

struct Classification {
    Kind kind = Kind::none;
    std::string reason;  // first violated condition when kind == none
    double det = 0.0;
    double min_proper_minor = 0.0;
    int negative_eigenvalues = 0;
};

inline constexpr double kRankTol = 1e-9;
inline constexpr double kRowSpanTol = 1e-8;

namespace detail {

inline Mat principal(const Mat& G, unsigned mask) {
    std::vector<int> idx;
    for (int i = 0; i < G.rows(); ++i)
        if (mask & (1u << i)) idx.push_back(i);
    Mat S(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) S(a, b) = G(idx[a], idx[b]);
    return S;
}

}  // namespace detail

// Principal minors of orders 2..n-1: smallest value, and the largest of order n-1.
struct MinorScan {
    double min_proper = INFINITY;
    unsigned argmin = 0;
    double max_codim1 = 0.0;
};

inline MinorScan scan_minors(const Mat& G) {
    const int n = static_cast<int>(G.rows());
    MinorScan s;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const int size = std::popcount(mask);
        if (size < 2 || size > n - 1) continue;
        const double d = detail::principal(G, mask).determinant();
        if (d < s.min_proper) { s.min_proper = d; s.argmin = mask; }
        if (size == n - 1) s.max_codim1 = std::max(s.max_codim1, d);
    }
    return s;
}

inline double quad_form_inverse(const Mat& Ginv, const Mat& H, int p) {
    const Vec h = H.row(p).transpose();
    return h.dot(Ginv * h);
}

inline Classification classify(const GHPair& x) {
    check_pair(x);
    const int n = x.n;
    Classification c;
    Eigen::SelfAdjointEigenSolver<Mat> es(x.G);
    const Vec lam = es.eigenvalues();
    c.det = x.G.determinant();
    for (int i = 0; i < n; ++i) c.negative_eigenvalues += lam[i] < 0;
    const MinorScan ms = scan_minors(x.G);
    c.min_proper_minor = ms.min_proper;

    auto minor_name = [&](unsigned mask) {
        std::string s = "{";
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s += (s.size() > 1 ? "," : "") + std::to_string(i + 1);
        return s + "}";
    };
    const bool minors_ok = ms.min_proper > 0.0;

    if (std::abs(c.det) < kRankTol * ms.max_codim1) {
        if (!minors_ok) {
            c.reason = "(E1) principal minor " + minor_name(ms.argmin) + " of G is not positive";
            return c;
        }
        const Vec w = es.eigenvectors().col(0);
        for (int p = 0; p < n; ++p) {
            const Vec h = x.H.row(p).transpose();
            if (std::abs(h.dot(w)) <= kRowSpanTol * h.norm()) {
                c.reason = "(E2) row " + std::to_string(p + 1) + " of H lies in the row span of G";
                return c;
            }
        }
        c.kind = Kind::euclidean;
        return c;
    }
    if (c.det > 0) {
        if (lam[0] > 0) {
            c.kind = Kind::spherical;
        } else {
            c.reason = "det G > 0 but G is not positive definite";
        }
        return c;
    }
    if (c.negative_eigenvalues != 1) {
        c.reason = "(L1) G does not have negative index of inertia 1";
        return c;
    }
    if (!minors_ok) {
        c.reason = "(L1) principal minor " + minor_name(ms.argmin) + " of G is not positive";
        return c;
    }
    const Mat Ginv = x.G.partialPivLu().inverse();
    for (int p = 0; p < n; ++p)
        if (!(quad_form_inverse(Ginv, x.H, p) < 0)) {
            c.reason = "(L2) sum g^{qr} h_pq h_pr is not negative for p = " + std::to_string(p + 1);
            return c;
        }
    c.kind = Kind::hyperbolic;
    return c;
}

struct Butterfly {
    AmbientSpace space;
    std::vector<Vec> normals;
    Vec m_normal;
    Vec alt_a, alt_b;
    std::vector<Vec> anchors_a, anchors_b0, duals;
};

// Per-vertex sign flips for the spherical square roots; a flipped vertex is
// the antipode of the default one.
struct SignFlags {
    std::vector<bool> a, b;
};

inline Butterfly recover(const GHPair& x, Kind which, const SignFlags& flags = {}) {
    check_pair(x);
    if (which == Kind::none) throw ContractError("recover: pair is not realisable");
    const int n = x.n;
    Butterfly B;
    B.space = {space_of(which), n};

    if (which == Kind::euclidean) {
        auto f = gram_factorize(x.G, Signature::pos_semidef_rank_n_minus_1);
        B.normals = std::move(f.normals);
        B.m_normal = std::move(f.m);
        Eigen::SelfAdjointEigenSolver<Mat> es(x.G);
        Vec w = es.eigenvectors().col(0).normalized();
        for (int p = 0; p < n; ++p)
            if (w[p] != 0.0) {
                if (w[p] < 0) w = -w;
                break;
            }
        for (int p = 0; p < n; ++p)
            if (std::abs(w[p]) < 1e-10)
                throw DegenerateAltitudeError("recover: null vector of G has a zero entry");
        B.alt_a = w.cwiseInverse();
        B.alt_b.resize(n);
        for (int p = 0; p < n; ++p) {
            const double s = x.H.row(p).dot(w);
            if (std::abs(s) <= kRowSpanTol * x.H.row(p).norm())
                throw DegenerateAltitudeError("recover: sum_q h_pq / a_q vanishes for p = " + std::to_string(p + 1));
            B.alt_b[p] = 1.0 / s;
        }
        // pseudo-inverse on the positive eigenspace
        Mat Gplus = Mat::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const Vec v = es.eigenvectors().col(i);
            Gplus += v * v.transpose() / es.eigenvalues()[i];
        }
        Mat N(n, n);  // row q = n_q
        for (int q = 0; q < n; ++q) N.row(q) = B.normals[q].transpose();
        B.anchors_a.resize(n);
        B.duals.resize(n);
        for (int p = 0; p < n; ++p) {
            // centroid at the origin: (a_p, n_r) = a_r (delta_pr - 1/n)
            Vec rhs(n);
            for (int r = 0; r < n; ++r) rhs[r] = B.alt_a[r] * ((r == p ? 1.0 : 0.0) - 1.0 / n);
            B.anchors_a[p] = N.transpose() * (Gplus * rhs);
            B.duals[p] = B.anchors_a[p] / B.alt_a[p];
        }
    } else {
        const bool hyp = which == Kind::hyperbolic;
        auto f = gram_factorize(x.G, hyp ? Signature::lorentzian : Signature::pos_def);
        B.normals = std::move(f.normals);
        B.m_normal = std::move(f.m);
        const double eps = hyp ? -1.0 : 1.0;
        const Mat Ginv = x.G.partialPivLu().inverse();
        B.duals.assign(n, Vec::Zero(B.space.dim()));
        for (int p = 0; p < n; ++p)
            for (int r = 0; r < n; ++r) B.duals[p] += Ginv(p, r) * B.normals[r];
        B.alt_a.resize(n);
        B.alt_b.resize(n);
        B.anchors_a.resize(n);
        for (int p = 0; p < n; ++p) {
            const double ga = eps * Ginv(p, p);
            if (!(ga > 0)) throw SignatureError("recover: eps g^{pp} is not positive");
            double a = 1.0 / std::sqrt(ga);
            if (hyp) {
                if (B.duals[p][n] < 0) a = -a;
            } else if (p < static_cast<int>(flags.a.size()) && flags.a[p]) {
                a = -a;
            }
            B.alt_a[p] = a;
            B.anchors_a[p] = a * B.duals[p];
        }
        for (int p = 0; p < n; ++p) {
            const double gb = eps * quad_form_inverse(Ginv, x.H, p);
            if (!(gb > 0)) throw DegenerateAltitudeError("recover: eps sum g^{qr} h_pq h_pr is not positive");
            Vec dir = Vec::Zero(B.space.dim());
            for (int q = 0; q < n; ++q) dir += x.H(p, q) * B.duals[q];
            double b = 1.0 / std::sqrt(gb);
            if (hyp) {
                if (dir[n] < 0) b = -b;
            } else if (p < static_cast<int>(flags.b.size()) && flags.b[p]) {
                b = -b;
            }
            B.alt_b[p] = b;
        }
    }
    B.anchors_b0.resize(n);
    for (int p = 0; p < n; ++p) {
        Vec s = Vec::Zero(B.space.dim());
        for (int q = 0; q < n; ++q) s += x.H(p, q) * B.duals[q];
        B.anchors_b0[p] = B.alt_b[p] * s;
    }
    return B;
}

// Largest violation of the defining identities of a recovered butterfly.
inline double butterfly_residual(const Butterfly& B, const GHPair& x) {
    const auto& sp = B.space;
    const int n = static_cast<int>(B.normals.size());
    double r = (gram_of(sp, B.normals) - x.G).cwiseAbs().maxCoeff();
    r = std::max(r, std::abs(bilinear(sp, B.m_normal, B.m_normal) - 1.0));
    for (int p = 0; p < n; ++p) {
        r = std::max(r, std::abs(bilinear(sp, B.normals[p], B.m_normal)));
        Vec s = Vec::Zero(sp.dim());
        for (int q = 0; q < n; ++q) s += x.H(p, q) * B.duals[q];
        r = std::max(r, (B.anchors_b0[p] - B.alt_b[p] * s).cwiseAbs().maxCoeff());
    }
    if (sp.kind == SpaceKind::euclidean) {
        Vec s = Vec::Zero(sp.dim());
        for (int p = 0; p < n; ++p) s += B.normals[p] / B.alt_a[p];
        r = std::max(r, s.cwiseAbs().maxCoeff());
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int k = 0; k < n; ++k) {
                    const double want = B.alt_a[k] * ((p == k) - (q == k));
                    r = std::max(r, std::abs(bilinear(sp, B.anchors_a[p] - B.anchors_a[q], B.normals[k]) - want));
                }
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                r = std::max(r, std::abs(bilinear(sp, B.anchors_a[p] - B.anchors_a[q], B.m_normal)));
    } else {
        for (int p = 0; p < n; ++p) {
            r = std::max(r, std::abs(bilinear(sp, B.anchors_a[p], B.m_normal)));
            r = std::max(r, model_residual(sp, B.anchors_a[p]));
            r = std::max(r, model_residual(sp, B.anchors_b0[p]));
            for (int q = 0; q < n; ++q)
                r = std::max(r, std::abs(bilinear(sp, B.anchors_a[p], B.normals[q]) - (p == q) * B.alt_a[q]));
        }
    }
    return r;
}

// (G,H) read back off a butterfly.
inline GHPair pair_of(const Butterfly& B) {
    const auto& sp = B.space;
    const int n = static_cast<int>(B.normals.size());
    GHPair x{n, gram_of(sp, B.normals), Mat::Zero(n, n)};
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            Vec v = B.anchors_b0[p];
            if (sp.kind == SpaceKind::euclidean) v -= B.anchors_a[q == 0 ? 1 : 0];
            x.H(p, q) = bilinear(sp, v, B.normals[q]) / B.alt_b[p];
        }
    for (int p = 0; p < n; ++p) {
        x.G(p, p) = 1.0;
        x.H(p, p) = 1.0;
        for (int q = 0; q < p; ++q) x.G(q, p) = x.G(p, q);
    }
    return x;
}

enum class Reversion { a_rev, b_rev };

inline GHPair reversion(const GHPair& x, int p, Reversion kind) {
    if (p < 0 || p >= x.n) throw ContractError("reversion: index out of range");
    GHPair y = x;
    for (int q = 0; q < x.n; ++q) {
        if (q == p) continue;
        if (kind == Reversion::a_rev) {
            y.G(p, q) = y.G(q, p) = -x.G(p, q);
            y.H(p, q) = x.H(p, q) - 2 * x.G(p, q);
            y.H(q, p) = -x.H(q, p);
        } else {
            y.H(p, q) = 2 * x.G(p, q) - x.H(p, q);
        }
    }
    return y;
}

inline Vec wing_position(const Butterfly& B, int p, double phi) {
    const double b = B.alt_b[p];
    return B.anchors_b0[p] + b * (std::cos(phi) - 1.0) * B.normals[p] + b * std::sin(phi) * B.m_normal;
}

// Same rotation driven by the half-angle pair t = s/c: cos phi - 1 = -2 s^2,
// sin phi = 2 s c. Exact at t = infinity.
inline Vec wing_position(const Butterfly& B, int p, const Proj& t) {
    const double b = B.alt_b[p];
    return B.anchors_b0[p] - 2.0 * b * t.s * t.s * B.normals[p] + 2.0 * b * t.s * t.c * B.m_normal;
}

inline double half_angle_to_phi(const Proj& t) { return 2.0 * std::atan2(t.s, t.c); }

struct BricardCoeffs {
    double A, B, C, D, E;
};

inline BricardCoeffs bricard_coeffs(double alpha, double beta, double gamma, double delta) {
    const double cg = std::cos(gamma);
    return {cg - std::cos(alpha + beta + delta), cg - std::cos(alpha + beta - delta),
            -2.0 * std::sin(beta) * std::sin(delta), cg - std::cos(alpha - beta + delta),
            cg - std::cos(alpha - beta - delta)};
}

}  // namespace flexcross
