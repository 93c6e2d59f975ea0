#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "shearmix/chains.hpp"
#include "shearmix/observable.hpp"
#include "shearmix/profiles.hpp"

namespace shearmix {

struct DriftSpec {
    double beta = 0.2;
    double b = 1.0;
    double K = kPi / 2.0;
    double T = 10.0;
    double eps0 = 0.1;
};

struct TwoPointDriftSpec {
    double h = 0.25;
    double s_star = 0.5;
    double a = 0.1;
    double c0 = 1.0;
    double eps = 0.1;  // F-exclusion radius of the bounded region C
};

/// Defaults with K = max of the two profiles' distortion constants.
DriftSpec default_drift_spec(const Model& model);

/// V(q, p) = max(d(q, C_f2), d(p, C_f1))^(-beta) + b.
class DriftFunction {
public:
    DriftFunction(const Model& model, DriftSpec spec);

    /// +inf on F.
    double V(TorusPoint x) const;
    double V1(TorusPoint x) const { return V(x) - spec_.b; }
    /// max(d(q, C_f2), d(p, C_f1)), the distance driving V.
    double critical_distance(TorusPoint x) const;
    double dist_to_F(TorusPoint x) const;
    const DriftSpec& spec() const { return spec_; }

private:
    DriftSpec spec_;
    std::vector<double> cq_;  // zeros of f2
    std::vector<double> cp_;  // zeros of f1
};

double eval_V(TorusPoint x, const DriftFunction& drift);

/// V2 = W + a (V1(x) + V1(y)) off C, c0 on C, with W = max_k d(x(k), y)^(-h)
/// and C = {dist to Delta >= s*, dist({x, y}, F) >= eps}.
class TwoPointDrift {
public:
    TwoPointDrift(const Model& model, DriftSpec spec, TwoPointDriftSpec spec2, InvariantSet delta);

    double W(const TwoPointState& s) const;
    bool in_C(const TwoPointState& s) const;
    /// +inf on Delta and on F.
    double V2(const TwoPointState& s) const;
    const TwoPointDriftSpec& spec2() const { return spec2_; }
    const InvariantSet& delta() const { return delta_; }
    const DriftFunction& one_point() const { return v_; }

private:
    DriftFunction v_;
    TwoPointDriftSpec spec2_;
    InvariantSet delta_;
};

double eval_V2(const TwoPointState& s, const TwoPointDrift& drift);

/// Closed-form bounds on PV/V near F for the two cases of the drift argument.
double drift_bound(int which, double K, double beta, double T);

/// Smallest T (3 significant digits) with max(case 1, case 2) < 1; empty
/// when the threshold exceeds 1e300.
std::optional<double> find_min_T(double K, double beta);

struct DriftRatio {
    double ratio = 1.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::size_t clipped = 0;  // draws that landed within 1e-12 of F
};

/// Monte Carlo PV(x)/V(x) over n one-step schedule draws at horizon spec.T.
/// x must lie within eps0 of F.
DriftRatio empirical_drift_ratio(TorusPoint x, const Model& model, const DriftSpec& spec, std::size_t n,
                                 std::uint64_t seed);

struct NearFPoint {
    TorusPoint x;
    TorusPoint center;  // the point of F
    double radius = 0.0;
    double angle = 0.0;
};

/// Polar grid of 8 radii eps0*k/8 and 16 angles around every point of F.
std::vector<NearFPoint> near_F_points(const Model& model, double eps0);

struct DriftSurveyRow {
    NearFPoint point;
    DriftRatio ratio;
};

std::vector<DriftSurveyRow> drift_survey(const Model& model, const DriftSpec& spec, std::size_t n, std::uint64_t seed);

struct Ball {
    TorusPoint center{kPi / 2.0, kPi / 2.0};
    double radius = 0.05;
};

struct CorrelationSeries {
    std::vector<double> c;        // |mean g(Phi^m x) g(Phi^m y)|, m = 0..m_max
    std::vector<double> stderr_;
    std::size_t window = 0;       // leading run of m with c_m > 3 stderr_m
    double lambda_hat = 0.0;      // exp(slope of log c_m over the window)
    double r2 = 0.0;
    bool fitted = false;
};

/// Pairs (x, y) uniform in the ball, one shared schedule per pair.
/// g must be mean-zero to 1e-6.
CorrelationSeries correlation_series(const Model& model, const Observable& g, const Ball& ball, std::size_t n_pairs,
                                     std::size_t m_max, double T, std::uint64_t seed);

struct TwoPointDriftRow {
    double h = 0.0;
    double ratio = 0.0;
    double stderr_ = 0.0;
};

/// Monte Carlo E V2(Phi(x), Phi(y)) / V2(x, y) for each h.
std::vector<TwoPointDriftRow> empirical_two_point_drift(const TwoPointState& s, const Model& model,
                                                        const DriftSpec& spec, TwoPointDriftSpec spec2,
                                                        std::size_t n, std::uint64_t seed,
                                                        const std::vector<double>& hs = {0.1, 0.25, 0.5});

}  // namespace shearmix
