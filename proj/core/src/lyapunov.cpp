#include "shearmix/lyapunov.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "shearmix/chains.hpp"
#include "shearmix/errors.hpp"
#include "shearmix/flow.hpp"
#include "shearmix/rng.hpp"
#include "shearmix/stats.hpp"

namespace shearmix {

namespace {

TorusPoint initial_point(CounterRng& rng, const std::vector<TorusPoint>& F) {
    for (;;) {
        const TorusPoint x{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        bool near = false;
        for (const auto& c : F) near = near || torus_distance(x, c) < 1e-9;
        if (!near) return x;
    }
}

void check_args(double T, std::size_t m, std::size_t n) {
    if (m < 1) throw PreconditionError("m >= 1 required");
    if (n < 2) throw PreconditionError("n_samples >= 2 required");
    if (!(T >= 0.0)) throw PreconditionError("T >= 0 required");
}

}  // namespace

LyapunovEstimate estimate_lambda1(const Model& model, double T, std::size_t m, std::size_t n_samples,
                                  std::uint64_t seed, LyapunovOptions opts) {
    check_args(T, m, n_samples);
    const auto F = critical_points(model);
    std::vector<double> per_sample(n_samples);
    const auto n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < n; ++jj) {
        const auto j = static_cast<std::uint64_t>(jj);
        CounterRng rng(seed, tags::initial, j);
        TangentState s;
        s.x = initial_point(rng, F);
        const double theta = rng.uniform(0.0, kTwoPi);
        s.u = {std::cos(theta), std::sin(theta)};
        const std::uint64_t key = stream_key(seed, tags::schedule, j);
        for (std::size_t i = 0; i < m; ++i) {
            const double t1 = T * uniform01(key, 2 * i);
            const double t2 = opts.horizontal_only ? 0.0 : T * uniform01(key, 2 * i + 1);
            s = tangent_step(s, t1, t2, model, true);
        }
        per_sample[static_cast<std::size_t>(jj)] = s.log_norm / static_cast<double>(m);
    }
    SampleStats st;
    for (double v : per_sample) st.add(v);
    LyapunovEstimate e;
    e.T = T;
    e.m = m;
    e.n_samples = n_samples;
    e.seed = seed;
    e.lambda1 = st.mean();
    e.stderr_ = st.stderr_mean();
    e.ci_lo = e.lambda1 - 1.96 * e.stderr_;
    e.ci_hi = e.lambda1 + 1.96 * e.stderr_;
    return e;
}

double estimate_lambda_sum(const Model& model, double T, std::size_t m, std::size_t n_samples, std::uint64_t seed) {
    check_args(T, m, n_samples);
    const auto F = critical_points(model);
    std::vector<double> per_sample(n_samples);
    const auto n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < n; ++jj) {
        const auto j = static_cast<std::uint64_t>(jj);
        CounterRng rng(seed, tags::initial, j);
        TorusPoint x = initial_point(rng, F);
        const std::uint64_t key = stream_key(seed, tags::schedule, j);
        CompensatedSum acc;
        for (std::size_t i = 0; i < m; ++i) {
            const ShearResult r = step(x, T * uniform01(key, 2 * i), T * uniform01(key, 2 * i + 1), model);
            acc.add(std::log(std::abs(r.jac.determinant())));
            x = r.x;
        }
        per_sample[static_cast<std::size_t>(jj)] = acc.value() / static_cast<double>(m);
    }
    SampleStats st;
    for (double v : per_sample) st.add(v);
    return st.mean();
}

std::vector<LyapunovEstimate> lambda_vs_T(const Model& model, std::span<const double> T_grid, std::size_t m,
                                          std::size_t n_samples, std::uint64_t seed) {
    if (T_grid.empty()) throw PreconditionError("lambda_vs_T: empty T grid");
    std::vector<LyapunovEstimate> out;
    for (double T : T_grid) out.push_back(estimate_lambda1(model, T, m, n_samples, seed));
    return out;
}

}  // namespace shearmix
