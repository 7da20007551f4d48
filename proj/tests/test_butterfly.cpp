#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flexcross/butterfly.hpp"

using namespace flexcross;

namespace {

// unit vectors in R^dim, dim = n for a positive definite G and n-1 for a
// singular one
GHPair random_pair(std::mt19937& rng, int n, bool singular) {
    std::normal_distribution<double> N(0, 1);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    const int dim = singular ? n - 1 : n;
    AmbientSpace e{SpaceKind::euclidean, dim};
    std::vector<Vec> xs;
    for (int i = 0; i < n; ++i) {
        Vec x(dim);
        for (int j = 0; j < dim; ++j) x[j] = N(rng);
        xs.push_back(x.normalized());
    }
    GHPair x{n, gram_of(e, xs), Mat::Identity(n, n)};
    x.G.diagonal().setOnes();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < p; ++q) x.G(q, p) = x.G(p, q);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (p != q) x.H(p, q) = U(rng);
    return x;
}

// G = (1-g) I + g J: eigenvalues 1 + (n-1) g and 1 - g
GHPair uniform_pair(int n, double g) {
    GHPair x{n, Mat::Constant(n, n, g), Mat::Identity(n, n)};
    x.G.diagonal().setOnes();
    return x;
}

double gap(const GHPair& x, const GHPair& y) {
    return std::max((x.G - y.G).cwiseAbs().maxCoeff(), (x.H - y.H).cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Butterfly, CheckPair) {
    GHPair x = uniform_pair(3, 0.1);
    EXPECT_NO_THROW(check_pair(x));
    x.G(0, 1) = 0.2;
    EXPECT_THROW(check_pair(x), ContractError);
    x = uniform_pair(3, 0.1);
    x.H(1, 1) = 0.5;
    EXPECT_THROW(check_pair(x), ContractError);
}

TEST(Butterfly, ClassifyHandExamples) {
    EXPECT_EQ(classify(uniform_pair(3, 0.0)).kind, Kind::spherical);

    // rows sum to zero, H = I is outside the row span
    const auto e = classify(uniform_pair(3, -0.5));
    EXPECT_EQ(e.kind, Kind::euclidean);
    EXPECT_NEAR(e.det, 0.0, 1e-15);

    // g = -0.6: one negative eigenvalue; diag of G^-1 is (1/1.6)(1 - 3) < 0
    const auto h = classify(uniform_pair(3, -0.6));
    EXPECT_EQ(h.kind, Kind::hyperbolic);
    EXPECT_EQ(h.negative_eigenvalues, 1);

    // eigenvalues 5, -1, -1: det > 0 without being positive definite
    const auto indef = classify(uniform_pair(3, 2.0));
    EXPECT_EQ(indef.kind, Kind::none);
    EXPECT_NE(indef.reason.find("not positive definite"), std::string::npos);

    // eigenvalues 7, -1, -1, -1: det < 0 with the wrong inertia
    const auto none = classify(uniform_pair(4, 2.0));
    EXPECT_EQ(none.kind, Kind::none);
    EXPECT_EQ(none.negative_eigenvalues, 3);
    EXPECT_NE(none.reason.find("(L1)"), std::string::npos);

    // singular G whose H row lies in its row span
    auto bad = uniform_pair(3, -0.5);
    bad.H << 1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1;
    const auto c = classify(bad);
    EXPECT_EQ(c.kind, Kind::none);
    EXPECT_NE(c.reason.find("(E2)"), std::string::npos);
}

TEST(Butterfly, HyperbolicNeedsNegativeQuadraticForm) {
    auto x = uniform_pair(3, -0.6);
    // G^-1 = (I - 3J)/1.6, so a row summing to zero gives |h|^2/1.6 > 0
    x.H(0, 1) = 3;
    x.H(0, 2) = -4;
    const auto c = classify(x);
    EXPECT_EQ(c.kind, Kind::none);
    EXPECT_NE(c.reason.find("(L2)"), std::string::npos);
}

TEST(Butterfly, RecoverRoundTripSpherical) {
    std::mt19937 rng(21);
    for (int n = 3; n <= 6; ++n)
        for (int rep = 0; rep < 10; ++rep) {
            const auto x = random_pair(rng, n, false);
            ASSERT_EQ(classify(x).kind, Kind::spherical);
            const auto B = recover(x, Kind::spherical);
            EXPECT_LT(butterfly_residual(B, x), 1e-9);
            EXPECT_LT(gap(pair_of(B), x), 1e-9);
            // vertices on the sphere, anchors a_p on the great sphere m-perp
            for (int p = 0; p < n; ++p) {
                EXPECT_LT(model_residual(B.space, B.anchors_a[p]), 1e-11);
                EXPECT_LT(model_residual(B.space, B.anchors_b0[p]), 1e-11);
                EXPECT_NEAR(bilinear(B.space, B.anchors_a[p], B.m_normal), 0.0, 1e-12);
            }
        }
}

TEST(Butterfly, RecoverRoundTripEuclidean) {
    std::mt19937 rng(22);
    int tried = 0;
    for (int n = 3; n <= 6; ++n)
        for (int rep = 0; rep < 10; ++rep) {
            const auto x = random_pair(rng, n, true);
            const auto c = classify(x);
            if (c.kind != Kind::euclidean) continue;
            ++tried;
            const auto B = recover(x, Kind::euclidean);
            EXPECT_LT(butterfly_residual(B, x), 1e-9);
            EXPECT_LT(gap(pair_of(B), x), 1e-8);
            // sum a_p^-1 n_p = 0 and the unit-norm scale
            Vec s = Vec::Zero(n);
            double norm2 = 0;
            for (int p = 0; p < n; ++p) {
                s += B.normals[p] / B.alt_a[p];
                norm2 += 1 / (B.alt_a[p] * B.alt_a[p]);
            }
            EXPECT_LT(s.norm(), 1e-10);
            EXPECT_NEAR(norm2, 1.0, 1e-12);
        }
    EXPECT_GT(tried, 10);
}

TEST(Butterfly, RecoverHyperbolic) {
    const auto x = uniform_pair(4, -0.4);
    ASSERT_EQ(classify(x).kind, Kind::hyperbolic);
    const auto B = recover(x, Kind::hyperbolic);
    EXPECT_LT(butterfly_residual(B, x), 1e-9);
    EXPECT_LT(gap(pair_of(B), x), 1e-9);
    for (int p = 0; p < 4; ++p) {
        EXPECT_GT(B.anchors_a[p][4], 0);
        EXPECT_GT(B.anchors_b0[p][4], 0);
    }
}

TEST(Butterfly, Reversions) {
    std::mt19937 rng(23);
    std::vector<GHPair> samples;
    for (int i = 0; i < 8; ++i) samples.push_back(random_pair(rng, 4, false));
    for (int i = 0; i < 8; ++i) samples.push_back(random_pair(rng, 4, true));
    samples.push_back(uniform_pair(4, -0.4));
    samples.push_back(uniform_pair(4, 2.0));
    for (const auto& x : samples) {
        const Kind k = classify(x).kind;
        for (int p = 0; p < 4; ++p) {
            for (auto r : {Reversion::a_rev, Reversion::b_rev}) {
                EXPECT_LT(gap(reversion(reversion(x, p, r), p, r), x), 1e-14);
                EXPECT_EQ(classify(reversion(x, p, r)).kind, k);
            }
            const int q = (p + 1) % 4;
            const auto ab = reversion(reversion(x, p, Reversion::a_rev), p, Reversion::b_rev);
            const auto ba = reversion(reversion(x, p, Reversion::b_rev), p, Reversion::a_rev);
            EXPECT_LT(gap(ab, ba), 1e-15);
            const auto pq = reversion(reversion(x, p, Reversion::a_rev), q, Reversion::a_rev);
            const auto qp = reversion(reversion(x, q, Reversion::a_rev), p, Reversion::a_rev);
            EXPECT_LT(gap(pq, qp), 1e-15);
        }
    }
}

TEST(Butterfly, BReversionMovesWingByPi) {
    std::mt19937 rng(24);
    std::uniform_real_distribution<double> Phi(-3, 3);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = random_pair(rng, 4, false);
        const auto B = recover(x, Kind::spherical);
        const int p = rep % 4;
        SignFlags f{std::vector<bool>(4, false), std::vector<bool>(4, false)};
        f.b[p] = true;
        const auto R = recover(reversion(x, p, Reversion::b_rev), Kind::spherical, f);
        for (int q = 0; q < 4; ++q) {
            const double phi = Phi(rng);
            const double shifted = q == p ? phi + std::numbers::pi : phi;
            EXPECT_LT((wing_position(B, q, phi) - wing_position(R, q, shifted)).norm(), 1e-9);
            EXPECT_LT((B.anchors_a[q] - R.anchors_a[q]).norm(), 1e-9);
        }
    }
}

TEST(Butterfly, HalfAngleMatchesAngle) {
    const auto x = uniform_pair(3, 0.2);
    const auto B = recover(x, Kind::spherical);
    for (double v : {-5.0, -0.3, 0.0, 0.9, 40.0}) {
        const Proj t = Proj::of(v);
        EXPECT_LT((wing_position(B, 1, t) - wing_position(B, 1, half_angle_to_phi(t))).norm(), 1e-13);
    }
    EXPECT_LT((wing_position(B, 1, Proj::infinity()) - wing_position(B, 1, std::numbers::pi)).norm(), 1e-13);
}

TEST(Butterfly, BricardIdentity) {
    std::mt19937 rng(25);
    std::uniform_real_distribution<double> A(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
        const double al = A(rng), be = A(rng), ga = A(rng), de = A(rng);
        const auto c = bricard_coeffs(al, be, ga, de);
        const double s = std::sin(al) * std::sin(be) * std::sin(ga) * std::sin(de);
        const double lhs = std::pow(c.C * c.C - c.A * c.E - c.B * c.D, 2) - 4 * c.A * c.B * c.D * c.E;
        EXPECT_NEAR(lhs, 16 * s * s, 1e-10);
    }
}
