#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "shearmix/chains.hpp"
#include "shearmix/flow.hpp"

namespace shearmix {

enum class SteeringMethod { exact, numeric };
std::string to_string(SteeringMethod m);

struct SteeringPlan {
    Schedule legs;
    double residual = 0.0;  // terminal distance after forward simulation
    SteeringMethod method = SteeringMethod::exact;
};

/// Argmax of |f| (circle-valued magnitude for the identity, giving pi).
double profile_anchor(const ShearProfile& f);

/// Exact one-point plan: optional preparatory vertical move, shears to the
/// anchor (argmax|f2|, argmax|f1|), then a horizontal leg at the anchor row
/// and a vertical leg at the target column (or, when f2 vanishes there, a
/// vertical leg at the anchor column followed by a horizontal leg).  Every
/// duration is capped at T_cap via split_schedule.
SteeringPlan steer_to(TorusPoint x, TorusPoint target, const Model& model, double T_cap);

/// Replace (t1, t2) with t1 > cap by (t1/n, 0) x (n-1), (t1/n, t2), and an
/// oversized t2 by (.., t2/n), (0, t2/n) x (n-1).  Endpoints are unchanged.
Schedule split_schedule(const Schedule& s, double T_cap);

struct NumericSteerOptions {
    int starts = 64;
    int max_iterations = 200;
    double init_horizon = 10.0;  // initial durations drawn from Uniform[0, init_horizon]
    double success = 1e-3;
};

/// Levenberg-Marquardt on tau = s^2 over 2 n_steps durations, minimizing the
/// wrapped terminal mismatch (projective angle taken mod pi).  Starts run in
/// order and stop at the first success, so the result is seed-deterministic.
SteeringPlan numeric_steer(const Model& model, const ProjectiveState& start, const ProjectiveState& target,
                           std::size_t n_steps, std::uint64_t seed, NumericSteerOptions opts = {});
SteeringPlan numeric_steer(const Model& model, const TwoPointState& start, const TwoPointState& target,
                           std::size_t n_steps, std::uint64_t seed, NumericSteerOptions opts = {});

}  // namespace shearmix
