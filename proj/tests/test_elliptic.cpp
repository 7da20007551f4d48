#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flexcross/elliptic.hpp"

using namespace flexcross;

namespace {

// K(k) by the trapezoid rule on the periodic integrand over [0, 2 pi];
// converges geometrically, shares nothing with the AGM.
double K_quadrature(double k) {
    const int N = 4096;
    double s = 0;
    for (int i = 0; i < N; ++i) {
        const double t = 2 * std::numbers::pi * i / N;
        const double x = std::sin(t);
        s += 1.0 / std::sqrt(1.0 - k * k * x * x);
    }
    return s * (2 * std::numbers::pi / N) / 4.0;
}

double rel_d(double u, double sigma, double k) {
    const double kp2 = (1 - k) * (1 + k);
    const auto a = sn_cn_dn(sigma, k), b = sn_cn_dn(u, k), c = sn_cn_dn(u - sigma, k);
    return a.sn * a.sn * b.dn * b.dn * c.dn * c.dn + a.cn * a.cn * (b.dn * b.dn + c.dn * c.dn) -
           2 * a.dn * b.dn * c.dn + kp2 * a.sn * a.sn;
}

}  // namespace

TEST(Elliptic, QuarterPeriodAgainstQuadrature) {
    for (double k : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99}) {
        const auto m = quarter_periods(k);
        EXPECT_NEAR(m.K, K_quadrature(k), 1e-11) << "k = " << k;
        EXPECT_NEAR(m.K, std::comp_ellint_1(k), 1e-13) << "k = " << k;
        EXPECT_NEAR(m.K_prime, std::comp_ellint_1(m.k_prime), 1e-12) << "k = " << k;
    }
}

TEST(Elliptic, InvertsIncompleteIntegral) {
    // u = F(phi, k) means sn u = sin phi
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> Ph(-1.5, 1.5), Kd(0.05, 0.99);
    for (int i = 0; i < 500; ++i) {
        const double phi = Ph(rng), k = Kd(rng);
        const double u = std::ellint_1(k, phi);
        const auto f = sn_cn_dn(u, k);
        EXPECT_NEAR(f.sn, std::sin(phi), 1e-13);
        EXPECT_NEAR(f.cn, std::cos(phi), 1e-13);
        EXPECT_NEAR(f.dn, std::sqrt(1 - k * k * std::sin(phi) * std::sin(phi)), 1e-13);
    }
}

TEST(Elliptic, Identities) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-20, 20), Kd(0.1, 0.95);
    for (int i = 0; i < 500; ++i) {
        const double u = U(rng), k = Kd(rng);
        const auto f = sn_cn_dn(u, k);
        EXPECT_NEAR(f.sn * f.sn + f.cn * f.cn, 1.0, 1e-14);
        EXPECT_NEAR(f.dn * f.dn + k * k * f.sn * f.sn, 1.0, 1e-14);
        // half-period shift
        const double K = quarter_periods(k).K;
        const auto g = sn_cn_dn(u + 2 * K, k);
        EXPECT_NEAR(g.sn, -f.sn, 1e-12);
        EXPECT_NEAR(g.cn, -f.cn, 1e-12);
        EXPECT_NEAR(g.dn, f.dn, 1e-12);
        // d sn / du = cn dn
        const double h = 1e-5;
        const double d = (sn_cn_dn(u + h, k).sn - sn_cn_dn(u - h, k).sn) / (2 * h);
        EXPECT_NEAR(d, f.cn * f.dn, 1e-8);
    }
}

TEST(Elliptic, SpecialValues) {
    for (int i = 0; i < 20; ++i) {
        const double k = 0.05 + 0.045 * i;
        const auto m = quarter_periods(k);
        const double kp = m.k_prime;
        const auto atK = sn_cn_dn(m.K, k);
        EXPECT_NEAR(atK.sn, 1.0, 1e-14);
        EXPECT_NEAR(atK.cn, 0.0, 1e-14);
        EXPECT_NEAR(atK.dn, kp, 1e-14);
        const auto half = sn_cn_dn(m.K / 2, k);
        EXPECT_NEAR(half.dn, std::sqrt(kp), 1e-12);
        EXPECT_NEAR(half.sn, 1 / std::sqrt(1 + kp), 1e-12);
        EXPECT_NEAR(half.cn, std::sqrt(kp / (1 + kp)), 1e-12);
    }
}

TEST(Elliptic, DnAdditionIdentity) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-10, 10), Kd(0.1, 0.95);
    for (int i = 0; i < 1000; ++i) EXPECT_NEAR(rel_d(U(rng), U(rng), Kd(rng)), 0.0, 1e-11);
}

TEST(Elliptic, DegenerateModulusOne) {
    for (double u : {-3.0, -0.2, 0.0, 0.7, 5.0}) {
        const auto f = sn_cn_dn(u, 1.0);
        EXPECT_DOUBLE_EQ(f.sn, std::tanh(u));
        EXPECT_DOUBLE_EQ(f.cn, 1 / std::cosh(u));
        EXPECT_DOUBLE_EQ(f.dn, 1 / std::cosh(u));
    }
}

TEST(Elliptic, InverseDn) {
    for (double k : {0.2, 0.6, 0.9, 0.999}) {
        const auto m = quarter_periods(k);
        for (double t : {0.01, 0.25, 0.5, 0.9, 0.99}) {
            const double u = t * m.K;
            EXPECT_NEAR(inverse_dn(sn_cn_dn(u, k).dn, k), u, 1e-9 * m.K);
        }
    }
    EXPECT_THROW(inverse_dn(0.5, 1.5), DomainError);
    EXPECT_THROW(inverse_dn(1.5, 0.5), DomainError);
}

TEST(Elliptic, DomainErrors) {
    EXPECT_THROW(quarter_periods(0.0), DomainError);
    EXPECT_THROW(quarter_periods(1.0), DomainError);
    EXPECT_THROW(sn_cn_dn(0.3, 1.2), DomainError);
    EXPECT_THROW(sn_cn_dn(0.3, -0.1), DomainError);
}

TEST(Elliptic, ComplementaryNearOne) {
    // 1 - k is exact here; sqrt(1 - k*k) would keep about half the digits
    const double k = 1 - std::ldexp(1.0, -40);
    const double want = std::sqrt(std::ldexp(1.0, -40) * (2 - std::ldexp(1.0, -40)));
    EXPECT_NEAR(complementary(k) / want, 1.0, 1e-15);
}
