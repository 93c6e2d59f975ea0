#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "shearmix/profiles.hpp"
#include "shearmix/torus.hpp"

namespace shearmix {

enum class Direction { horizontal, vertical };

using Jacobian2 = Eigen::Matrix2d;

struct ShearResult {
    TorusPoint x;
    Jacobian2 jac;
};

/// Horizontal: (q + tau f1(p), p).  Vertical: (q, p + tau f2(q)).
ShearResult shear_step(TorusPoint x, double tau, Direction dir, const Model& model);
TorusPoint shear_point(TorusPoint x, double tau, Direction dir, const Model& model);

/// One chain step: vertical(tau2) after horizontal(tau1).
ShearResult step(TorusPoint x, double tau1, double tau2, const Model& model);
TorusPoint step_point(TorusPoint x, double tau1, double tau2, const Model& model);

/// Undo step(x, tau1, tau2).
TorusPoint inverse_step(TorusPoint x, double tau1, double tau2, const Model& model);

/// Alternating durations (tau1, tau2, tau3, ...): odd slots horizontal,
/// even slots vertical.
struct Schedule {
    std::vector<double> durations;
    double horizon = 0.0;
    std::optional<std::uint64_t> seed;  // empty for explicit schedules

    std::size_t steps() const { return durations.size() / 2; }
    double horizontal(std::size_t i) const { return durations[2 * i]; }
    double vertical(std::size_t i) const { return durations[2 * i + 1]; }

    static Schedule explicit_steps(std::vector<double> durations);
};

/// 2m durations iid Uniform[0, T].  Duration i of sample j is a pure
/// function of (seed, j, i).  T = 0 gives the all-zero schedule.
Schedule sample_schedule(std::uint64_t seed, std::size_t m, double T, std::uint64_t sample = 0);

/// Duration i of sample j, without materializing the schedule.
double schedule_duration(std::uint64_t seed, std::uint64_t sample, std::uint64_t i, double T);

TorusPoint run_schedule(TorusPoint x, const Schedule& s, const Model& model);
TorusPoint run_schedule_inverse(TorusPoint x, const Schedule& s, const Model& model);

}  // namespace shearmix
