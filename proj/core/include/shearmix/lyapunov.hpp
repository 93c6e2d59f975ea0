#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shearmix/profiles.hpp"

namespace shearmix {

struct LyapunovEstimate {
    double T = 0.0;
    std::size_t m = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double lambda1 = 0.0;  // per composed step
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;

    /// Per unit of flow time; one step lasts T on average.
    double lambda1_per_time() const { return T > 0.0 ? lambda1 / T : 0.0; }
};

struct LyapunovOptions {
    bool horizontal_only = false;  // force every vertical duration to 0
};

/// Mean of log|DPhi^m u|/m over n independent (x, u, schedule) samples.
/// x is uniform on T^2 (resampled within 1e-9 of F), u uniform on the circle.
LyapunovEstimate estimate_lambda1(const Model& model, double T, std::size_t m, std::size_t n_samples,
                                  std::uint64_t seed, LyapunovOptions opts = {});

/// Mean of log|det DPhi^m|/m; zero up to rounding for these maps.
double estimate_lambda_sum(const Model& model, double T, std::size_t m, std::size_t n_samples, std::uint64_t seed);

std::vector<LyapunovEstimate> lambda_vs_T(const Model& model, std::span<const double> T_grid, std::size_t m,
                                          std::size_t n_samples, std::uint64_t seed);

}  // namespace shearmix
