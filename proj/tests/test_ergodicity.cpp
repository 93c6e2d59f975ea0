#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "shearmix/ergodicity.hpp"
#include "shearmix/errors.hpp"
#include "shearmix/observable.hpp"

using namespace shearmix;

namespace {

// Both bounds written out term by term in long double.
long double bound1(long double K, long double b, long double T) {
    return K * std::pow(2.0L, b) / (T * T) + std::pow(2.0L, 2 + b) * std::pow(K, b + 1) / std::pow(T, 1 - b) +
           std::pow(2.0L, -b);
}

long double bound2(long double K, long double b, long double T) {
    return std::pow(4.0L, b) * std::pow(K, b) / std::pow(T, 2 - b) +
           std::pow(4.0L, 1 + b) * std::pow(K, 2 + 2 * b) / std::pow(T, 0.5L - 2 * b) +
           3 * K / std::pow(T, (1 - b) / 2) + std::pow(2.0L, -b);
}

DriftSpec sine_spec(double T = 10.0) {
    DriftSpec s = default_drift_spec(pierrehumbert());
    s.T = T;
    return s;
}

}  // namespace

TEST(DriftFunction, ArithmeticExample) {
    const DriftFunction V(pierrehumbert(), sine_spec());
    EXPECT_NEAR(V.V({kPi / 2, kPi / 2}), std::pow(kPi / 2, -0.2) + 1.0, 1e-14);
    // (pi/2)^(-1/5) + 1 evaluated to 7 digits
    EXPECT_NEAR(eval_V({kPi / 2, kPi / 2}, V), 1.9136419, 1e-7);
    EXPECT_TRUE(std::isinf(V.V({0.0, kPi})));
}

TEST(DriftFunction, BlowsUpMonotonicallyTowardF) {
    const DriftFunction V(pierrehumbert(), sine_spec());
    double prev = 0.0;
    for (double t = 1.0; t > 1e-8; t *= 0.5) {
        const double v = V.V({t * 0.3, t * 0.7});
        ASSERT_GT(v, prev);
        prev = v;
    }
}

TEST(DriftFunction, AtLeastOneEverywhere) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (const auto& m : {pierrehumbert(), chirikov_analog()}) {
        const DriftFunction V(m, default_drift_spec(m));
        for (int i = 0; i < 10000; ++i) ASSERT_GE(V.V({u(g), u(g)}), 1.0);
    }
}

TEST(DriftBound, HandComputedValues) {
    EXPECT_NEAR(drift_bound(1, kPi / 2, 0.1, 100.0), 1.04490, 1e-4);
    for (double K : {1.0, kPi / 2, 3.0})
        for (double b : {0.05, 0.1, 0.2, 0.3})
            for (double T : {0.5, 10.0, 1e4}) {
                EXPECT_NEAR(drift_bound(1, K, b, T), static_cast<double>(bound1(K, b, T)), 1e-12 * bound1(K, b, T));
                EXPECT_NEAR(drift_bound(2, K, b, T), static_cast<double>(bound2(K, b, T)), 1e-12 * bound2(K, b, T));
            }
}

TEST(DriftBound, DecreasingInT) {
    for (int which : {1, 2}) {
        double prev = drift_bound(which, kPi / 2, 0.2, 1.0);
        for (double T = 2.0; T < 1e12; T *= 2.0) {
            const double v = drift_bound(which, kPi / 2, 0.2, T);
            ASSERT_LT(v, prev);
            prev = v;
        }
    }
}

TEST(DriftBound, CaseTwoDivergesForLargeBeta) {
    EXPECT_GT(drift_bound(2, kPi / 2, 0.3, 1e12), drift_bound(2, kPi / 2, 0.3, 1e6));
}

TEST(DriftBound, RejectsBadArguments) {
    EXPECT_THROW(drift_bound(1, 0.5, 0.1, 10.0), PreconditionError);
    EXPECT_THROW(drift_bound(1, 1.0, 0.6, 10.0), PreconditionError);
    EXPECT_THROW(drift_bound(3, 1.0, 0.1, 10.0), PreconditionError);
}

TEST(FindMinT, BisectionContract) {
    for (double beta : {0.05, 0.1, 0.2}) {
        const auto T = find_min_T(kPi / 2, beta);
        ASSERT_TRUE(T.has_value()) << beta;
        auto mx = [&](double t) { return std::max(drift_bound(1, kPi / 2, beta, t), drift_bound(2, kPi / 2, beta, t)); };
        EXPECT_LT(mx(*T), 1.0);
        EXPECT_GE(mx(*T), 0.999);
        EXPECT_GE(mx(*T / 2), 1.0);
    }
    // At beta = 0.2 the case-2 middle term sets the threshold.
    const double T = *find_min_T(kPi / 2, 0.2);
    EXPECT_GT(drift_bound(2, kPi / 2, 0.2, T), drift_bound(1, kPi / 2, 0.2, T));
    EXPECT_GT(T, 1e15);
    EXPECT_THROW(find_min_T(kPi / 2, 0.3), PreconditionError);
}

TEST(DriftRatio, ContractionNearF) {
    const auto r = empirical_drift_ratio({1e-3, 1e-3}, pierrehumbert(), sine_spec(), 100000, 3);
    EXPECT_LT(r.ratio + 1.96 * r.stderr_, 1.0);
    EXPECT_EQ(r.n, 100000u);
}

TEST(DriftRatio, ZeroHorizonIsExactlyOne) {
    const auto r = empirical_drift_ratio({0.01, 0.02}, pierrehumbert(), sine_spec(0.0), 100, 3);
    EXPECT_EQ(r.ratio, 1.0);
}

TEST(DriftRatio, IndependentEstimatesAgree) {
    const auto a = empirical_drift_ratio({0.02, 3.1}, pierrehumbert(), sine_spec(), 50000, 1);
    const auto b = empirical_drift_ratio({0.02, 3.1}, pierrehumbert(), sine_spec(), 50000, 2);
    EXPECT_LT(std::abs(a.ratio - b.ratio), 3 * (a.stderr_ + b.stderr_));
}

TEST(DriftRatio, Preconditions) {
    EXPECT_THROW(empirical_drift_ratio({1.0, 1.0}, pierrehumbert(), sine_spec(), 100, 1), PreconditionError);
    EXPECT_THROW(empirical_drift_ratio({0.0, 0.0}, pierrehumbert(), sine_spec(), 100, 1), PreconditionError);
}

TEST(DriftSurvey, PolarGridAroundEveryPointOfF) {
    const auto pts = near_F_points(pierrehumbert(), 0.1);
    EXPECT_EQ(pts.size(), 4u * 8u * 16u);
    const DriftFunction V(pierrehumbert(), sine_spec());
    for (const auto& p : pts) {
        EXPECT_LE(p.radius, 0.1 + 1e-15);
        EXPECT_NEAR(torus_distance(p.x, p.center), p.radius, 1e-12);
        EXPECT_LE(V.dist_to_F(p.x), 0.1 + 1e-12);
    }
}

TEST(TwoPoint, DiagonalIsInfinite) {
    const auto m = pierrehumbert();
    const TwoPointDrift D(m, sine_spec(), {}, build_invariant_set(m));
    EXPECT_TRUE(std::isinf(D.V2({{1.0, 2.0}, {1.0, 2.0}})));
    // pi - 0.3 rounds, so this pair sits within an ulp of the component
    EXPECT_GT(eval_V2({{0.0, 0.3}, {kPi, kPi - 0.3}}, D), 1e3);
    EXPECT_LT(eval_V2({{0.0, 0.3}, {kPi, 1.0}}, D), 1e2);
}

TEST(TwoPoint, RegionCAndFormula) {
    const auto m = pierrehumbert();
    TwoPointDriftSpec s2;
    const TwoPointDrift D(m, sine_spec(), s2, build_invariant_set(m));
    const TwoPointState far{{1.0, 1.0}, {2.5, 4.5}};
    ASSERT_GE(dist_to_invariant(far, D.delta()), s2.s_star);
    EXPECT_TRUE(D.in_C(far));
    EXPECT_EQ(D.V2(far), s2.c0);
    const TwoPointState near{{1.0, 1.0}, {1.1, 1.0}};
    EXPECT_FALSE(D.in_C(near));
    const DriftFunction V(m, sine_spec());
    EXPECT_NEAR(D.V2(near), std::pow(0.1, -s2.h) + s2.a * (V.V1(near.x) + V.V1(near.y)), 1e-12);
}

TEST(TwoPoint, ComponentOrderDoesNotMatter) {
    const auto m = pierrehumbert();
    auto delta = build_invariant_set(m);
    const TwoPointDrift a(m, sine_spec(), {}, delta);
    std::reverse(delta.components.begin(), delta.components.end());
    const TwoPointDrift b(m, sine_spec(), {}, delta);
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int i = 0; i < 1000; ++i) {
        const TwoPointState s{{u(g), u(g)}, {u(g), u(g)}};
        ASSERT_EQ(a.W(s), b.W(s));
    }
}

TEST(TwoPoint, EmpiricalContractionOffDiagonal) {
    const auto m = pierrehumbert();
    const double off = 0.1 / std::sqrt(2.0);
    const TwoPointState s{{1.0, 2.0}, {1.0 + off, 2.0 + off}};
    const auto rows = empirical_two_point_drift(s, m, sine_spec(), {}, 100000, 5, {0.25});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_LT(rows[0].ratio + 1.96 * rows[0].stderr_, 1.0);
    const TwoPointState far{{1.0, 1.0}, {2.5, 4.5}};
    for (const auto& r : empirical_two_point_drift(far, m, sine_spec(), {}, 1000, 5)) {
        EXPECT_TRUE(std::isfinite(r.ratio));
        EXPECT_TRUE(std::isfinite(r.stderr_));
    }
    EXPECT_THROW(empirical_two_point_drift({{1.0, 2.0}, {1.0, 2.0}}, m, sine_spec(), {}, 100, 1), PreconditionError);
}

TEST(Correlations, InitialValueAndDegenerateObservables) {
    const auto m = pierrehumbert();
    const Ball ball;
    const auto c = correlation_series(m, Observable::sine_q(2.0), ball, 20000, 3, 10.0, 4);
    EXPECT_NEAR(c.c[0], 4.0, 0.08);
    const auto z = correlation_series(m, Observable::zero(), ball, 1000, 5, 10.0, 4);
    for (double v : z.c) EXPECT_EQ(v, 0.0);
    EXPECT_FALSE(z.fitted);
}

TEST(Correlations, SignInvariance) {
    const auto m = pierrehumbert();
    const auto a = correlation_series(m, Observable::sine_q(2.0), Ball{}, 5000, 8, 10.0, 6);
    const auto b = correlation_series(m, Observable::sine_q(-2.0), Ball{}, 5000, 8, 10.0, 6);
    EXPECT_EQ(a.c, b.c);
}

TEST(Correlations, GeometricDecay) {
    const auto c = correlation_series(pierrehumbert(), Observable::sine_q(2.0), Ball{}, 100000, 30, 10.0, 20240917);
    ASSERT_TRUE(c.fitted);
    EXPECT_LT(c.lambda_hat, 1.0);
    EXPECT_GT(c.r2, 0.9);
}

TEST(Correlations, RejectsNonZeroMean) {
    const auto g = Observable::fourier({{0, 0, 1.0, 0.0}});
    EXPECT_THROW(correlation_series(pierrehumbert(), g, Ball{}, 100, 3, 10.0, 1), PreconditionError);
}
