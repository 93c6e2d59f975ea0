#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>

#include <Eigen/LU>
#include <Eigen/QR>

#include "shearmix/flow.hpp"
#include "shearmix/stats.hpp"

using namespace shearmix;

namespace {

void expect_point(TorusPoint a, TorusPoint b, double tol) { EXPECT_LE(torus_distance(a, b), tol); }

void expect_identity(const Jacobian2& J, double tol) {
    EXPECT_LE((J - Jacobian2::Identity()).cwiseAbs().maxCoeff(), tol);
}

struct Draw {
    std::mt19937_64 gen;
    explicit Draw(unsigned s) : gen(s) {}
    double angle() { return std::uniform_real_distribution<double>(0.0, kTwoPi)(gen); }
    double tau(double T = 10.0) { return std::uniform_real_distribution<double>(0.0, T)(gen); }
};

}  // namespace

TEST(Shear, HorizontalExample) {
    const auto r = shear_step({0.0, kPi / 2}, kPi, Direction::horizontal, pierrehumbert());
    expect_point(r.x, {kPi, kPi / 2}, 1e-15);
    expect_identity(r.jac, 1e-15);
}

TEST(Shear, ZeroDurationIsIdentity) {
    for (const auto& model : {pierrehumbert(), chirikov_analog()}) {
        for (auto dir : {Direction::horizontal, Direction::vertical}) {
            const auto r = shear_step({1.1, 4.2}, 0.0, dir, model);
            EXPECT_EQ(r.x.q, 1.1);
            EXPECT_EQ(r.x.p, 4.2);
            expect_identity(r.jac, 0.0);
        }
    }
}

TEST(Shear, ChirikovVertical) {
    const auto r = shear_step({kPi / 2, 0.0}, 1.0, Direction::vertical, chirikov_analog());
    expect_point(r.x, {kPi / 2, kPi / 2}, 1e-15);
    Jacobian2 J;
    J << 1, 0, 1, 1;
    EXPECT_LE((r.jac - J).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Step, PierrehumbertExample) {
    const auto r = step({0.0, kPi / 2}, kPi / 2, kPi / 2, pierrehumbert());
    expect_point(r.x, {kPi / 2, kPi}, 1e-15);
    expect_identity(r.jac, 1e-15);
}

TEST(Step, ChirikovClosedForm) {
    Draw d(1);
    for (int i = 0; i < 1000; ++i) {
        const double q = d.angle(), p = d.angle(), t1 = d.tau(), t2 = d.tau();
        const double q1 = q + t1 * std::sin(p);
        const TorusPoint expected = wrap({q1, p + t2 * wrap_angle(q1)});
        expect_point(step_point({q, p}, t1, t2, chirikov_analog()), expected, 1e-12);
    }
}

TEST(Inverse, HorizontalClosedForm) {
    const auto m = pierrehumbert();
    const TorusPoint x{2.0, 0.7};
    expect_point(inverse_step(x, 3.0, 0.0, m), wrap({x.q - 3.0 * std::sin(x.p), x.p}), 1e-14);
    expect_point(inverse_step(x, 0.0, 0.0, m), x, 0.0);
}

TEST(Inverse, RoundTrip) {
    Draw d(2);
    for (const auto& model : {pierrehumbert(), chirikov_analog()}) {
        for (int i = 0; i < 10000; ++i) {
            const TorusPoint x{d.angle(), d.angle()};
            const double t1 = d.tau(), t2 = d.tau();
            ASSERT_LE(torus_distance(inverse_step(step_point(x, t1, t2, model), t1, t2, model), x), 1e-9);
        }
    }
}

TEST(Jacobian, MatchesCentralDifferences) {
    Draw d(3);
    const double h = 1e-6;
    const auto model = pierrehumbert();
    for (int i = 0; i < 500; ++i) {
        const TorusPoint x{d.angle(), d.angle()};
        const double tau = d.tau(3.0);
        for (auto dir : {Direction::horizontal, Direction::vertical}) {
            const auto J = shear_step(x, tau, dir, model).jac;
            for (int c = 0; c < 2; ++c) {
                TorusPoint a = x, b = x;
                (c == 0 ? a.q : a.p) += h;
                (c == 0 ? b.q : b.p) -= h;
                const auto fa = shear_point(a, tau, dir, model), fb = shear_point(b, tau, dir, model);
                ASSERT_NEAR(J(0, c), angle_diff(fa.q, fb.q) / (2 * h), 1e-6);
                ASSERT_NEAR(J(1, c), angle_diff(fa.p, fb.p) / (2 * h), 1e-6);
            }
        }
    }
}

// The raw product overflows any direct determinant; carry it as Q R instead
// (a QR-updated product), so det = det(Q) * prod diag(R).
double product_determinant(const std::vector<Jacobian2>& js) {
    Jacobian2 Q = Jacobian2::Identity();
    double log_abs = 0.0;
    int sign = 1;
    for (const auto& J : js) {
        Eigen::HouseholderQR<Jacobian2> qr(J * Q);
        Q = qr.householderQ();
        const Jacobian2 R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int k = 0; k < 2; ++k) {
            log_abs += std::log(std::abs(R(k, k)));
            if (R(k, k) < 0) sign = -sign;
        }
    }
    return sign * (Q.determinant() > 0 ? 1 : -1) * std::exp(log_abs);
}

TEST(Area, DeterminantOfLongProducts) {
    const auto model = pierrehumbert();
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const auto sched = sample_schedule(77, 100, 10.0, s);
        TorusPoint x{wrap_angle(0.37 * s), wrap_angle(1.3 + 0.11 * s)};
        std::vector<Jacobian2> js;
        for (std::size_t i = 0; i < sched.steps(); ++i) {
            const auto r = step(x, sched.horizontal(i), sched.vertical(i), model);
            x = r.x;
            js.push_back(r.jac);
        }
        ASSERT_LE(std::abs(product_determinant(js) - 1.0), 1e-9);
    }
}

TEST(Area, SingleStepDeterminantIsExact) {
    Draw d(4);
    for (int i = 0; i < 1000; ++i) {
        const auto r = step({d.angle(), d.angle()}, d.tau(), d.tau(), pierrehumbert());
        ASSERT_LE(std::abs(r.jac.determinant() - 1.0), 1e-12);
    }
}

TEST(Schedule, EmptyAndDeterministic) {
    EXPECT_EQ(sample_schedule(1, 0, 10.0).steps(), 0u);
    const auto a = sample_schedule(9, 50, 10.0, 3), b = sample_schedule(9, 50, 10.0, 3);
    EXPECT_EQ(a.durations, b.durations);
    EXPECT_NE(a.durations, sample_schedule(9, 50, 10.0, 4).durations);
    // Prefixes agree: draw i does not depend on the schedule length.
    const auto c = sample_schedule(9, 10, 10.0, 3);
    for (std::size_t i = 0; i < c.durations.size(); ++i) EXPECT_EQ(c.durations[i], a.durations[i]);
}

TEST(Schedule, UniformMoments) {
    const auto s = sample_schedule(2024, 500000, 10.0);
    SampleStats st;
    for (double t : s.durations) {
        ASSERT_GE(t, 0.0);
        ASSERT_LT(t, 10.0);
        st.add(t);
    }
    EXPECT_EQ(st.count(), 1000000u);
    EXPECT_NEAR(st.mean(), 5.0, 0.01);
    EXPECT_NEAR(st.variance(), 100.0 / 12.0, 0.05);
}

// Inverse consistency is checked step by step along long trajectories; a
// composed 100-step round trip would amplify rounding by exp(100 lambda1).
TEST(Schedule, StepwiseInverseAlongTrajectories) {
    for (const auto& model : {pierrehumbert(), chirikov_analog()}) {
        for (std::uint64_t k = 0; k < 200; ++k) {
            const auto s = sample_schedule(5, 100, 10.0, k);
            TorusPoint x{wrap_angle(0.4 + k), wrap_angle(5.5 * k)};
            for (std::size_t i = 0; i < s.steps(); ++i) {
                const auto y = step_point(x, s.horizontal(i), s.vertical(i), model);
                ASSERT_LE(torus_distance(inverse_step(y, s.horizontal(i), s.vertical(i), model), x), 1e-9);
                x = y;
            }
        }
    }
}

TEST(Schedule, ShortRoundTripThroughInverse) {
    const auto model = pierrehumbert();
    const auto s = sample_schedule(5, 3, 10.0);
    const TorusPoint x{0.4, 5.5};
    EXPECT_LE(torus_distance(run_schedule_inverse(run_schedule(x, s, model), s, model), x), 1e-9);
}

// Lebesgue measure is stationary: uniform points stay uniform.
TEST(Stationarity, ChiSquareOccupancy) {
    const auto model = pierrehumbert();
    const int bins = 16;
    std::vector<double> counts(bins * bins, 0.0);
    const auto sched = sample_schedule(31, 10, 10.0);
    Draw d(6);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const auto y = run_schedule({d.angle(), d.angle()}, sched, model);
        const int a = std::min(bins - 1, static_cast<int>(y.q / kTwoPi * bins));
        const int b = std::min(bins - 1, static_cast<int>(y.p / kTwoPi * bins));
        counts[a * bins + b] += 1.0;
    }
    const double expected = static_cast<double>(n) / (bins * bins);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(bins * bins - 1);
    EXPECT_GT(1.0 - boost::math::cdf(dist, chi2), 1e-3) << "chi2 = " << chi2;
}
