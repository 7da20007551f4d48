#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "flexcross/elliptic.hpp"
#include "flexcross/errors.hpp"
#include "flexcross/geometry.hpp"

namespace flexcross {

// A point of RP^1 as a unit pair, z = s/c. Canonical: c > 0, or (1, 0) for
// the point at infinity.
struct Proj {
    double s = 0.0, c = 1.0;

    static Proj ratio(double num, double den) {
        const double r = std::hypot(num, den);
        if (r == 0.0 || !std::isfinite(r)) throw DomainError("Proj: undefined ratio");
        Proj p{num / r, den / r};
        if (p.c < 0 || (p.c == 0 && p.s < 0)) { p.s = -p.s; p.c = -p.c; }
        if (p.c == 0) p.s = 1.0;
        return p;
    }
    static Proj of(double x) { return ratio(x, 1.0); }
    static Proj infinity() { return {1.0, 0.0}; }

    bool is_inf() const { return c == 0.0; }
    double value() const { return is_inf() ? std::numeric_limits<double>::infinity() : s / c; }
    Proj scaled(double lambda) const { return ratio(lambda * s, c); }
};

enum class Family { line, rational, elliptic1, elliptic2, exotic };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::line: return "line";
        case Family::rational: return "rational";
        case Family::elliptic1: return "elliptic1";
        case Family::elliptic2: return "elliptic2";
        case Family::exotic: return "exotic";
    }
    return "?";
}

// Tagged record rather than a variant: JSON round-trips stay trivial and
// only the fields of the active family are read.
struct EpbqCurve {
    Family family = Family::line;
    double k = 0.0;
    std::vector<double> mu;
    std::vector<double> sigma;
    int m_prime = 0;
    int alpha = 1;

    int m() const {
        switch (family) {
            case Family::line: return 1;
            case Family::rational: return static_cast<int>(mu.size());
            case Family::elliptic1:
            case Family::elliptic2: return static_cast<int>(sigma.size());
            case Family::exotic: return 3;
        }
        return 0;
    }
    // epsilon_j = +1 for the first m' coordinates
    double eps(int j) const { return j < m_prime ? 1.0 : -1.0; }

    static EpbqCurve line() { return {}; }
    static EpbqCurve rational(std::vector<double> mu) {
        EpbqCurve c;
        c.family = Family::rational;
        c.mu = std::move(mu);
        return c;
    }
    static EpbqCurve elliptic(Family kind, double k, std::vector<double> sigma, int m_prime) {
        EpbqCurve c;
        c.family = kind;
        c.k = k;
        c.sigma = std::move(sigma);
        c.m_prime = m_prime;
        return c;
    }
    static EpbqCurve exotic(double k, int alpha) {
        EpbqCurve c;
        c.family = Family::exotic;
        c.k = k;
        c.alpha = alpha;
        return c;
    }
};

inline void validate(const EpbqCurve& c) {
    switch (c.family) {
        case Family::line: return;
        case Family::rational:
            if (c.mu.empty()) throw SpecError("rational curve needs at least one mu");
            for (std::size_t j = 0; j < c.mu.size(); ++j) {
                if (!std::isfinite(c.mu[j])) throw SpecError("rational curve: non-finite mu");
                for (std::size_t l = 0; l < j; ++l)
                    if (std::abs(c.mu[j]) == std::abs(c.mu[l]))
                        throw SpecError("rational curve: |mu_j| must be pairwise distinct");
            }
            return;
        case Family::elliptic1:
        case Family::elliptic2: {
            if (!(c.k > 0 && c.k < 1)) throw SpecError("elliptic curve: k must lie in (0,1)");
            if (c.sigma.empty()) throw SpecError("elliptic curve needs at least one sigma");
            if (c.m_prime < 0 || c.m_prime > c.m()) throw SpecError("elliptic curve: m_prime out of range");
            const double K = quarter_periods(c.k).K;
            for (std::size_t j = 0; j < c.sigma.size(); ++j) {
                if (!std::isfinite(c.sigma[j])) throw SpecError("elliptic curve: non-finite sigma");
                for (std::size_t l = 0; l < j; ++l) {
                    const double r = std::remainder(c.sigma[j] - c.sigma[l], K);
                    if (std::abs(r) < 1e-12 * K)
                        throw SpecError("elliptic curve: sigma_j must be pairwise distinct modulo K");
                }
            }
            return;
        }
        case Family::exotic:
            if (!(c.k > 0 && c.k < 1)) throw SpecError("exotic curve: k must lie in (0,1)");
            if (c.alpha < 1 || c.alpha > 3) throw SpecError("exotic curve: alpha must be 1, 2 or 3");
            return;
    }
}

inline std::vector<Proj> eval(const EpbqCurve& c, double u) {
    std::vector<Proj> z;
    switch (c.family) {
        case Family::line: z.push_back(Proj::of(u)); break;
        case Family::rational:
            for (double mu : c.mu) z.push_back(mu == 0.0 ? Proj::of(u) : Proj::ratio(u * u + mu, u));
            break;
        case Family::elliptic1:
            for (int j = 0; j < c.m(); ++j) {
                const auto f = sn_cn_dn(u - c.sigma[j], c.k);
                z.push_back(j < c.m_prime ? Proj::of(f.dn) : Proj::ratio(f.cn, f.sn));
            }
            break;
        case Family::elliptic2:
            for (int j = 0; j < c.m(); ++j) {
                const auto f = sn_cn_dn(u - c.sigma[j], c.k);
                z.push_back(j < c.m_prime ? Proj::of(f.cn) : Proj::ratio(f.dn, c.k * f.sn));
            }
            break;
        case Family::exotic: {
            const auto q = quarter_periods(c.k);
            const double kp = q.k_prime;
            const auto f = sn_cn_dn(u, c.k);
            if (c.alpha == 1) {
                z.push_back(Proj::of(f.dn));
                z.push_back(Proj::of(sn_cn_dn(u - q.K / 2, c.k).dn));
                z.push_back(Proj::ratio(f.dn * f.dn + kp, f.dn));
            } else if (c.alpha == 2) {
                // shifted by +K/2, not -K/2: only this phase satisfies the
                // coefficient matrices below
                const auto g = sn_cn_dn(u + q.K / 2, c.k);
                z.push_back(Proj::of(f.dn));
                z.push_back(Proj::ratio(g.cn, g.sn));
                z.push_back(Proj::ratio(f.dn * f.dn - kp, f.dn));
            } else {
                const auto g = sn_cn_dn(u - q.K / 2, c.k);
                z.push_back(Proj::ratio(f.cn, f.sn));
                z.push_back(Proj::ratio(g.cn, g.sn));
                z.push_back(Proj::ratio(f.cn * f.cn - kp * f.sn * f.sn, f.sn * f.cn));
            }
            break;
        }
    }
    return z;
}

// Relation a z_j^2 z_l^2 + b_jl z_j^2 - 2 z_j z_l + b_lj z_l^2 + e = 0 per pair;
// diagonals carry no meaning and are left at 0.
struct CurveCoeffs {
    int m = 0;
    Mat a, b, e;
};

inline CurveCoeffs coeffs(const EpbqCurve& c) {
    if (c.family == Family::line) throw NoCoefficientsError("the trivial line has no coordinate pairs");
    validate(c);
    const int m = c.m();
    if (m < 2) throw NoCoefficientsError("a curve with m < 2 has no coordinate pairs");
    CurveCoeffs r{m, Mat::Zero(m, m), Mat::Zero(m, m), Mat::Zero(m, m)};

    if (c.family == Family::rational) {
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                if (j == l) continue;
                const double mj = c.mu[j], ml = c.mu[l], s = mj + ml;
                r.b(j, l) = 2 * ml / s;
                r.e(j, l) = 2 * (mj - ml) * (mj - ml) / s;
            }
        return r;
    }

    const double k = c.k, kp = complementary(k);
    if (c.family == Family::exotic) {
        const double e1 = c.alpha == 2 ? -1.0 : 1.0, e2 = c.alpha == 3 ? -1.0 : 1.0;
        const double rk = std::sqrt(kp), w = rk / (1 + e1 * kp);
        const double A = e2 / (rk * (1 + e1 * kp));
        r.a(0, 1) = r.a(1, 0) = A;
        r.a(1, 2) = r.a(2, 1) = A;
        r.b(0, 1) = w;
        r.b(0, 2) = 2;
        r.b(1, 0) = e1 * w;
        r.b(2, 1) = w;
        r.e(0, 1) = r.e(1, 0) = e1 * e2 * kp * w;
        r.e(0, 2) = r.e(2, 0) = e1 * e2 * 2 * kp;
        return r;
    }

    const bool first = c.family == Family::elliptic1;
    for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
            if (j == l) continue;
            const auto f = sn_cn_dn(c.sigma[j] - c.sigma[l], k);
            const double sn = f.sn, cn = f.cn, dn = f.dn, ej = c.eps(j);
            if (c.eps(j) == c.eps(l)) {
                if (first) {
                    r.a(j, l) = ej * sn * sn / dn;
                    r.b(j, l) = cn * cn / dn;
                    r.e(j, l) = ej * kp * kp * sn * sn / dn;
                } else {
                    r.a(j, l) = ej * k * k * sn * sn / cn;
                    r.b(j, l) = dn * dn / cn;
                    r.e(j, l) = -ej * kp * kp * sn * sn / cn;
                }
            } else if (first) {
                const double q = k * k * sn * cn;
                r.a(j, l) = ej / q;
                r.b(j, l) = dn * dn / q;
                r.e(j, l) = -ej * kp * kp / q;
            } else {
                const double q = sn * dn;
                r.a(j, l) = ej * k / q;
                r.b(j, l) = k * cn * cn / q;
                r.e(j, l) = ej * kp * kp / (k * q);
            }
        }
    return r;
}

// Homogenized relation: z_j = s_j/c_j, so poles need no special casing.
inline double pair_residual(double a, double bjl, double blj, double e, const Proj& x, const Proj& y) {
    const double sj = x.s, cj = x.c, sl = y.s, cl = y.c;
    return std::abs(a * sj * sj * sl * sl + bjl * sj * sj * cl * cl - 2 * sj * cj * sl * cl +
                    blj * cj * cj * sl * sl + e * cj * cj * cl * cl);
}

inline Mat relation_residual(const CurveCoeffs& cc, const std::vector<Proj>& z) {
    if (static_cast<int>(z.size()) != cc.m) throw ContractError("relation_residual: size mismatch");
    Mat r = Mat::Zero(cc.m, cc.m);
    for (int j = 0; j < cc.m; ++j)
        for (int l = 0; l < cc.m; ++l)
            if (j != l) r(j, l) = pair_residual(cc.a(j, l), cc.b(j, l), cc.b(l, j), cc.e(j, l), z[j], z[l]);
    return r;
}

// (1 - a e - b b')^2 - 4 a b b' e; must be positive for a realisable pair
inline double pair_inequality(double a, double bjl, double blj, double e) {
    const double t = 1 - a * e - bjl * blj;
    return t * t - 4 * a * bjl * blj * e;
}

enum class Screen { pass, fail_inequality, fail_sign_lemma };

inline const char* to_string(Screen s) {
    switch (s) {
        case Screen::pass: return "pass";
        case Screen::fail_inequality: return "fail_inequality";
        case Screen::fail_sign_lemma: return "fail_sign_lemma";
    }
    return "?";
}

struct PairVerdict {
    int j, l;
    Screen verdict;
    double inequality;
};

inline Screen screen_pair(double a, double bjl, double blj, double e) {
    if (pair_inequality(a, bjl, blj, e) <= 0) return Screen::fail_inequality;
    const auto sgn = [](double x) { return (x > 0) - (x < 0); };
    const int s = sgn(a);
    if (s != 0 && sgn(-bjl) == s && sgn(-blj) == s && sgn(e) == s && (a * e >= 1 || bjl * blj >= 1))
        return Screen::fail_sign_lemma;
    return Screen::pass;
}

inline std::vector<PairVerdict> realisable_screen(const CurveCoeffs& cc) {
    std::vector<PairVerdict> out;
    for (int j = 0; j < cc.m; ++j)
        for (int l = j + 1; l < cc.m; ++l) {
            const double a = cc.a(j, l), b1 = cc.b(j, l), b2 = cc.b(l, j), e = cc.e(j, l);
            out.push_back({j, l, screen_pair(a, b1, b2, e), pair_inequality(a, b1, b2, e)});
        }
    return out;
}

struct EllipticFit {
    double kappa = 0.0;  // +inf on the rational branch
    double k = 0.0;
    std::vector<double> nu;
    std::vector<double> sigma;
};

namespace detail {

inline double kappa_of(double a, double bb, double e) {
    const double den = a * bb * e;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    const double t = 1 - a * e - bb;
    return (t * t - 2 * den) / den;
}

inline double coeff_gap(const CurveCoeffs& x, const CurveCoeffs& y) {
    double g = 0;
    for (int j = 0; j < x.m; ++j)
        for (int l = 0; l < x.m; ++l) {
            if (j == l) continue;
            for (const Mat* p : {&x.a, &x.b, &x.e}) {
                const Mat& A = *p;
                const Mat& B = p == &x.a ? y.a : p == &x.b ? y.b : y.e;
                g = std::max(g, std::abs(A(j, l) - B(j, l)) / std::max(1.0, std::abs(A(j, l))));
            }
        }
    return g;
}

}  // namespace detail

// Inverse of coeffs() for the all-dn first-kind form.
inline EllipticFit fit_elliptic(const CurveCoeffs& cc, double tol = 1e-8) {
    const int m = cc.m;
    if (m < 2) throw NoCoefficientsError("fit_elliptic: need m >= 2");
    EllipticFit fit;

    std::vector<double> kap;
    for (int j = 0; j < m; ++j)
        for (int l = j + 1; l < m; ++l)
            kap.push_back(detail::kappa_of(cc.a(j, l), cc.b(j, l) * cc.b(l, j), cc.e(j, l)));
    const double k0 = kap.front();
    for (double x : kap) {
        const bool same = std::isinf(k0) ? std::isinf(x) : std::abs(x - k0) <= tol * std::abs(k0);
        if (!same) throw NotSingleFamilyError("fit_elliptic: kappa differs between pairs");
    }
    fit.kappa = k0;

    if (std::isinf(k0)) {
        // degenerate modulus: the rational family. b_jl / b_lj = mu_l / mu_j,
        // and mu_j = eps e^{2 sigma_j} with sigma_1 = 0
        fit.k = 1.0;
        fit.nu.assign(m, 1.0);
        fit.sigma.assign(m, 0.0);
        for (int l = 1; l < m; ++l) {
            const double r = cc.b(0, l) / cc.b(l, 0);
            if (!(std::isfinite(r) && r != 0.0)) throw FitError("fit_elliptic: no rational pattern");
            fit.sigma[l] = 0.5 * std::log(std::abs(r));
        }
        return fit;
    }
    if (k0 <= 2.0) throw NoRealModulusError("fit_elliptic: kappa <= 2 admits no real modulus");

    // k'^2 + 1/k'^2 = kappa, smaller root
    const double kp2 = (k0 - std::sqrt(k0 * k0 - 4.0)) / 2.0;
    const double kp = std::sqrt(kp2);
    fit.k = std::sqrt((1 - kp) * (1 + kp));

    fit.nu.resize(m);
    for (int j = 0; j < m; ++j) {
        const int l = j == 0 ? 1 : 0;
        const double num = 1 - cc.a(j, l) * cc.e(j, l) - cc.b(j, l) * cc.b(l, j);
        fit.nu[j] = std::sqrt(num / ((1 + kp2) * cc.a(j, l) * cc.b(j, l)));
    }

    // Eliminating sn^2, cn^2 from the pair system with dn^2 + k^2 sn^2 = 1 and
    // sn^2 + cn^2 = 1 gives xi = sn^2/dn, eta = cn^2/dn, so dn sigma = 1/(xi+eta).
    fit.sigma.assign(m, 0.0);
    for (int l = 1; l < m; ++l) {
        const double bb = cc.b(0, l) * cc.b(l, 0);
        const double xi = (1 - cc.a(0, l) * cc.e(0, l) - bb) / ((1 + kp2) * std::sqrt(bb));
        const double eta = std::sqrt(bb);
        const double d = 1.0 / (xi + eta);
        if (!(d > kp && d < 1.0)) throw FitError("fit_elliptic: dn(sigma) out of range");
        fit.sigma[l] = inverse_dn(d, fit.k);
    }

    // overall sign of sigma is a symmetry; fix the rest one at a time against
    // the pairs already settled
    auto regen = [&](int upto) {
        auto c = EpbqCurve::elliptic(Family::elliptic1, fit.k,
                                     std::vector<double>(fit.sigma.begin(), fit.sigma.begin() + upto), upto);
        return coeffs(c);
    };
    auto sub = [&](int upto) {
        CurveCoeffs s{upto, cc.a.topLeftCorner(upto, upto), cc.b.topLeftCorner(upto, upto),
                      cc.e.topLeftCorner(upto, upto)};
        return s;
    };
    for (int l = 2; l < m; ++l) {
        const double plus = detail::coeff_gap(sub(l + 1), regen(l + 1));
        fit.sigma[l] = -fit.sigma[l];
        const double minus = detail::coeff_gap(sub(l + 1), regen(l + 1));
        if (plus <= minus) fit.sigma[l] = -fit.sigma[l];
    }
    if (detail::coeff_gap(cc, regen(m)) > tol) throw FitError("fit_elliptic: regenerated coefficients do not match");
    return fit;
}

}  // namespace flexcross
