#include "shearmix/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shearmix/errors.hpp"
#include "shearmix/flow.hpp"
#include "shearmix/rng.hpp"
#include "shearmix/stats.hpp"

namespace shearmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist_to_set(double z, const std::vector<double>& roots) {
    double d = kInf;
    for (double r : roots) d = std::min(d, circle_distance(z, r));
    return d;
}

}  // namespace

DriftSpec default_drift_spec(const Model& model) {
    DriftSpec s;
    s.K = std::max(distortion_constant(model.f1), distortion_constant(model.f2));
    return s;
}

DriftFunction::DriftFunction(const Model& model, DriftSpec spec)
    : spec_(spec), cq_(zero_set(model.f2, 0).roots), cp_(zero_set(model.f1, 0).roots) {
    if (!(spec.beta > 0.0 && spec.beta < 0.5)) throw PreconditionError("beta must lie in (0, 1/2)");
    if (!(spec.b >= 0.0)) throw PreconditionError("b must be >= 0");
}

double DriftFunction::critical_distance(TorusPoint x) const {
    return std::max(dist_to_set(x.q, cq_), dist_to_set(x.p, cp_));
}

double DriftFunction::dist_to_F(TorusPoint x) const {
    if (cq_.empty() || cp_.empty()) return kInf;
    return std::hypot(dist_to_set(x.q, cq_), dist_to_set(x.p, cp_));
}

double DriftFunction::V(TorusPoint x) const {
    const double d = critical_distance(x);
    if (d == 0.0) return kInf;
    return std::pow(d, -spec_.beta) + spec_.b;
}

double eval_V(TorusPoint x, const DriftFunction& drift) { return drift.V(x); }

TwoPointDrift::TwoPointDrift(const Model& model, DriftSpec spec, TwoPointDriftSpec spec2, InvariantSet delta)
    : v_(model, spec), spec2_(spec2), delta_(std::move(delta)) {
    if (!(spec2.h > 0.0) || !(spec2.s_star > 0.0) || !(spec2.a > 0.0) || !(spec2.c0 >= 1.0) || !(spec2.eps > 0.0))
        throw PreconditionError("two-point drift parameters out of range");
}

double TwoPointDrift::W(const TwoPointState& s) const {
    // max_k d^(-h) is attained at the smallest distance.
    const double d = dist_to_invariant(s, delta_);
    if (d == 0.0) return kInf;
    return std::pow(d, -spec2_.h);
}

bool TwoPointDrift::in_C(const TwoPointState& s) const {
    return dist_to_invariant(s, delta_) >= spec2_.s_star &&
           std::min(v_.dist_to_F(s.x), v_.dist_to_F(s.y)) >= spec2_.eps;
}

double TwoPointDrift::V2(const TwoPointState& s) const {
    const double w = W(s);
    if (!std::isfinite(w)) return kInf;
    if (in_C(s)) return spec2_.c0;
    return w + spec2_.a * (v_.V1(s.x) + v_.V1(s.y));
}

double eval_V2(const TwoPointState& s, const TwoPointDrift& drift) { return drift.V2(s); }

double drift_bound(int which, double K, double beta, double T) {
    if (!(K >= 1.0)) throw PreconditionError("drift_bound: K >= 1 required");
    if (!(beta > 0.0 && beta < 0.5)) throw PreconditionError("drift_bound: beta must lie in (0, 1/2)");
    if (!(T > 0.0)) throw PreconditionError("drift_bound: T > 0 required");
    using std::pow;
    if (which == 1) {
        return K * pow(2.0, beta) / (T * T) + pow(2.0, 2.0 + beta) * pow(K, beta + 1.0) / pow(T, 1.0 - beta) +
               pow(2.0, -beta);
    }
    if (which == 2) {
        return pow(4.0, beta) * pow(K, beta) / pow(T, 2.0 - beta) +
               pow(4.0, 1.0 + beta) * pow(K, 2.0 + 2.0 * beta) / pow(T, 0.5 - 2.0 * beta) +
               3.0 * K / pow(T, 0.5 * (1.0 - beta)) + pow(2.0, -beta);
    }
    throw PreconditionError("drift_bound: case must be 1 or 2");
}

std::optional<double> find_min_T(double K, double beta) {
    if (!(beta > 0.0 && beta < 0.25)) throw PreconditionError("find_min_T: beta must lie in (0, 1/4)");
    auto bound = [&](double T) { return std::max(drift_bound(1, K, beta, T), drift_bound(2, K, beta, T)); };
    double lo = 1e-6;
    if (bound(lo) < 1.0) return lo;
    double hi = 1.0;
    while (bound(hi) >= 1.0) {
        lo = hi;
        hi *= 1e3;
        if (hi > 1e300) return std::nullopt;
    }
    while (hi / lo - 1.0 > 5e-4) {
        const double mid = std::sqrt(lo * hi);
        if (bound(mid) < 1.0) hi = mid;
        else lo = mid;
    }
    return hi;
}

DriftRatio empirical_drift_ratio(TorusPoint x, const Model& model, const DriftSpec& spec, std::size_t n,
                                 std::uint64_t seed) {
    if (n < 2) throw PreconditionError("empirical_drift_ratio: n >= 2 required");
    const DriftFunction drift(model, spec);
    const double v0 = drift.V(x);
    if (!std::isfinite(v0)) throw PreconditionError("empirical_drift_ratio: x lies in F");
    if (drift.dist_to_F(x) > spec.eps0 * (1.0 + 1e-12))
        throw PreconditionError("empirical_drift_ratio: x must lie within eps0 of F");
    DriftRatio out;
    out.n = n;
    if (spec.T == 0.0) return out;  // identity step
    std::vector<double> vals(n);
    std::vector<unsigned char> clipped(n, 0);
    const std::uint64_t key = stream_key(seed, tags::schedule, 0);
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < nn; ++jj) {
        const auto j = static_cast<std::uint64_t>(jj);
        const TorusPoint y = step_point(x, spec.T * uniform01(key, 2 * j), spec.T * uniform01(key, 2 * j + 1), model);
        double d = drift.critical_distance(y);
        if (d < 1e-12) {
            d = 1e-12;
            clipped[static_cast<std::size_t>(jj)] = 1;
        }
        vals[static_cast<std::size_t>(jj)] = std::pow(d, -spec.beta) + spec.b;
    }
    SampleStats st;
    for (std::size_t j = 0; j < n; ++j) {
        st.add(vals[j]);
        out.clipped += clipped[j];
    }
    out.ratio = st.mean() / v0;
    out.stderr_ = st.stderr_mean() / v0;
    return out;
}

std::vector<NearFPoint> near_F_points(const Model& model, double eps0) {
    std::vector<NearFPoint> out;
    for (const auto& c : critical_points(model)) {
        for (int k = 1; k <= 8; ++k) {
            const double r = eps0 * k / 8.0;
            for (int a = 0; a < 16; ++a) {
                const double th = kTwoPi * a / 16.0;
                out.push_back({wrap({c.q + r * std::cos(th), c.p + r * std::sin(th)}), c, r, th});
            }
        }
    }
    return out;
}

std::vector<DriftSurveyRow> drift_survey(const Model& model, const DriftSpec& spec, std::size_t n, std::uint64_t seed) {
    std::vector<DriftSurveyRow> rows;
    const auto pts = near_F_points(model, spec.eps0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        rows.push_back({pts[i], empirical_drift_ratio(pts[i].x, model, spec, n, mix64(seed + i))});
    return rows;
}

CorrelationSeries correlation_series(const Model& model, const Observable& g, const Ball& ball, std::size_t n_pairs,
                                     std::size_t m_max, double T, std::uint64_t seed) {
    if (n_pairs < 2) throw PreconditionError("correlation_series: n_pairs >= 2 required");
    if (!(ball.radius > 0.0)) throw PreconditionError("correlation_series: ball radius must be positive");
    if (std::abs(g.quadrature_mean()) > 1e-6) throw PreconditionError("correlation_series: observable is not mean-zero");
    const std::size_t rows = m_max + 1;
    std::vector<double> prod(n_pairs * rows);
    const auto nn = static_cast<std::int64_t>(n_pairs);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < nn; ++jj) {
        const auto j = static_cast<std::uint64_t>(jj);
        CounterRng rng(seed, tags::pairs, j);
        auto in_ball = [&]() {
            const double r = ball.radius * std::sqrt(rng.uniform());
            const double th = rng.uniform(0.0, kTwoPi);
            return wrap({ball.center.q + r * std::cos(th), ball.center.p + r * std::sin(th)});
        };
        TwoPointState s{in_ball(), in_ball()};
        const std::uint64_t key = stream_key(seed, tags::schedule, j);
        double* row = prod.data() + static_cast<std::size_t>(jj) * rows;
        for (std::size_t m = 0; m < rows; ++m) {
            row[m] = g(s.x.q, s.x.p) * g(s.y.q, s.y.p);
            if (m + 1 < rows) s = two_point_step(s, T * uniform01(key, 2 * m), T * uniform01(key, 2 * m + 1), model);
        }
    }
    CorrelationSeries out;
    out.c.resize(rows);
    out.stderr_.resize(rows);
    for (std::size_t m = 0; m < rows; ++m) {
        SampleStats st;
        for (std::size_t j = 0; j < n_pairs; ++j) st.add(prod[j * rows + m]);
        out.c[m] = std::abs(st.mean());
        out.stderr_[m] = st.stderr_mean();
    }
    while (out.window < rows && out.c[out.window] > 3.0 * out.stderr_[out.window]) ++out.window;
    if (out.window >= 2) {
        std::vector<double> xs, ys;
        for (std::size_t m = 0; m < out.window; ++m) {
            xs.push_back(static_cast<double>(m));
            ys.push_back(std::log(out.c[m]));
        }
        const LinearFit fit = fit_line(xs, ys);
        out.lambda_hat = std::exp(fit.slope);
        out.r2 = fit.r2;
        out.fitted = true;
    }
    return out;
}

std::vector<TwoPointDriftRow> empirical_two_point_drift(const TwoPointState& s, const Model& model,
                                                        const DriftSpec& spec, TwoPointDriftSpec spec2,
                                                        std::size_t n, std::uint64_t seed,
                                                        const std::vector<double>& hs) {
    if (n < 2) throw PreconditionError("empirical_two_point_drift: n >= 2 required");
    const InvariantSet delta = build_invariant_set(model);
    if (dist_to_invariant(s, delta) < 1e-6)
        throw PreconditionError("empirical_two_point_drift: pair lies on the invariant set");
    // Images are shared across h so the rows differ only through V2.
    std::vector<TwoPointState> images(n);
    const std::uint64_t key = stream_key(seed, tags::schedule, 0);
    for (std::size_t j = 0; j < n; ++j)
        images[j] = two_point_step(s, spec.T * uniform01(key, 2 * j), spec.T * uniform01(key, 2 * j + 1), model);
    std::vector<TwoPointDriftRow> out;
    for (double h : hs) {
        spec2.h = h;
        const TwoPointDrift drift(model, spec, spec2, delta);
        const double v0 = drift.V2(s);
        SampleStats st;
        for (const auto& im : images) st.add(drift.V2(im));
        out.push_back({h, st.mean() / v0, st.stderr_mean() / v0});
    }
    return out;
}

}  // namespace shearmix
