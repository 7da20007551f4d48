#pragma once

#include <cmath>
#include <numbers>

#include "flexcross/errors.hpp"

namespace flexcross {

inline double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return 0.5 * (a + b);
}

// k' without the cancellation of sqrt(1 - k*k) near k = 1
inline double complementary(double k) { return std::sqrt((1.0 - k) * (1.0 + k)); }

struct EllipticModulus {
    double k = 0, k_prime = 0, K = 0, K_prime = 0;
};

inline EllipticModulus quarter_periods(double k) {
    if (!(k > 0.0 && k < 1.0)) throw DomainError("quarter_periods: k must lie in (0,1)");
    EllipticModulus m;
    m.k = k;
    m.k_prime = complementary(k);
    m.K = std::numbers::pi / (2.0 * agm(1.0, m.k_prime));
    m.K_prime = std::numbers::pi / (2.0 * agm(1.0, k));
    return m;
}

struct SnCnDn {
    double sn, cn, dn;
};

// Descending Landen (AGM) scheme. u is reduced mod 4K first so the
// amplitude recursion never sees large arguments.
inline SnCnDn sn_cn_dn(double u, double k) {
    if (k == 1.0) {
        const double c = 1.0 / std::cosh(u);
        return {std::tanh(u), c, c};
    }
    if (!(k > 0.0 && k < 1.0)) throw DomainError("sn_cn_dn: k must lie in (0,1]");
    const double kp = complementary(k);

    constexpr int kMax = 32;
    double a[kMax + 1], c[kMax + 1];
    a[0] = 1.0;
    double b = kp;
    c[0] = k;
    int N = 0;
    while (std::abs(c[N]) > 1e-15 * a[N] && N < kMax) {
        a[N + 1] = 0.5 * (a[N] + b);
        c[N + 1] = 0.5 * (a[N] - b);
        b = std::sqrt(a[N] * b);
        ++N;
    }
    const double K = std::numbers::pi / (2.0 * a[N]);
    u = std::fmod(u, 4.0 * K);
    if (u < 0) u += 4.0 * K;

    double phi = std::ldexp(a[N] * u, N);
    for (int i = N; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    const double sn = std::sin(phi), cn = std::cos(phi);
    // cos(phi0)/cos(phi1-phi0) is 0/0 at u = K; this form is not
    const double dn = std::sqrt(cn * cn + kp * kp * sn * sn);
    return {sn, cn, dn};
}

inline double inverse_dn(double d, double k) {
    if (!(k > 0.0 && k < 1.0)) throw DomainError("inverse_dn: k must lie in (0,1)");
    const auto m = quarter_periods(k);
    if (!(d > m.k_prime && d < 1.0)) throw DomainError("inverse_dn: d must lie in (k',1)");
    // dn falls strictly on [0,K]
    double lo = 0.0, hi = m.K;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * m.K; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sn_cn_dn(mid, k).dn > d ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const auto f = sn_cn_dn(u, k);
        const double slope = -k * k * f.sn * f.cn;
        if (slope == 0.0) break;
        const double next = u - (f.dn - d) / slope;
        if (!(next > 0.0 && next < m.K)) break;
        u = next;
    }
    return u;
}

}  // namespace flexcross
