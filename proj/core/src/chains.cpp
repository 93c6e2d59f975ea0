#include "shearmix/chains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shearmix/errors.hpp"
#include "shearmix/rng.hpp"

namespace shearmix {

TangentState tangent_step(const TangentState& s, double tau1, double tau2, const Model& model, bool renormalize) {
    const double n0 = s.u.norm();
    if (!(n0 > 0.0)) throw PreconditionError("tangent_step: zero tangent vector");
    const ShearResult r = step(s.x, tau1, tau2, model);
    TangentState out{r.x, r.jac * s.u, s.log_norm};
    if (renormalize) {
        // Ratio rather than the bare length keeps identity steps at exactly zero gain.
        const double n = out.u.norm();
        out.u /= n;
        out.log_norm += std::log(n / n0);
    }
    return out;
}

bool same_projective(const ProjectiveState& a, const ProjectiveState& b, double tol) {
    if (torus_distance(a.x, b.x) > tol) return false;
    return std::min((a.u - b.u).norm(), (a.u + b.u).norm()) <= tol;
}

ProjectiveState projective_step(const ProjectiveState& s, double tau1, double tau2, const Model& model) {
    const ShearResult r = step(s.x, tau1, tau2, model);
    Eigen::Vector2d u = r.jac * s.u;
    return {r.x, u / u.norm()};
}

TwoPointState two_point_step(const TwoPointState& s, double tau1, double tau2, const Model& model) {
    return {step_point(s.x, tau1, tau2, model), step_point(s.y, tau1, tau2, model)};
}

std::string InvariantComponent::describe() const {
    std::ostringstream os;
    os.precision(17);
    auto coord = [&](int sign, const char* v, double off) {
        std::ostringstream c;
        c.precision(17);
        if (off != 0.0) c << off << (sign > 0 ? "+" : "-") << v;
        else c << (sign > 0 ? "" : "-") << v;
        return c.str();
    };
    os << "(" << coord(sign_q, "q", offset_q) << ", " << coord(sign_p, "p", offset_p) << ")";
    return os.str();
}

bool commutes_with_shears(const InvariantComponent& c, const Model& model) {
    for (int j = 0; j < 64; ++j) {
        const double t = kTwoPi * (j + 0.6180339887) / 64.0;
        const double r1 = c.sign_q * model.f1(t) - model.f1(wrap_angle(c.sign_p * t + c.offset_p));
        const double r2 = c.sign_p * model.f2(t) - model.f2(wrap_angle(c.sign_q * t + c.offset_q));
        if (std::abs(r1) > 1e-9 || std::abs(r2) > 1e-9) return false;
    }
    return true;
}

InvariantSet build_invariant_set(const Model& model) {
    const SymmetryData s1 = symmetry_data(model.f1);
    const SymmetryData s2 = symmetry_data(model.f2);
    std::vector<InvariantComponent> cands;
    for (double a : s2.periods)
        for (double ap : s1.periods)
            if (a != 0.0 || ap != 0.0) cands.push_back({InvariantFamily::shift_shift, 1, a, 1, ap});
    for (double A : s2.antiperiods)
        for (double b : s1.even_axes) cands.push_back({InvariantFamily::shift_reflect, 1, A, -1, 2.0 * b});
    for (double c : s2.even_axes)
        for (double A : s1.antiperiods) cands.push_back({InvariantFamily::reflect_shift, -1, 2.0 * c, 1, A});
    for (double d : s2.odd_centers)
        for (double dp : s1.odd_centers) cands.push_back({InvariantFamily::reflect_reflect, -1, 2.0 * d, -1, 2.0 * dp});

    InvariantSet delta;
    delta.components.push_back({});
    for (auto c : cands) {
        c.offset_q = wrap_angle(c.offset_q);
        c.offset_p = wrap_angle(c.offset_p);
        if (circle_distance(c.offset_q, 0.0) <= 1e-9) c.offset_q = 0.0;
        if (circle_distance(c.offset_p, 0.0) <= 1e-9) c.offset_p = 0.0;
        const bool dup = std::any_of(delta.components.begin(), delta.components.end(), [&](const auto& e) {
            return e.sign_q == c.sign_q && e.sign_p == c.sign_p && circle_distance(e.offset_q, c.offset_q) <= 1e-9 &&
                   circle_distance(e.offset_p, c.offset_p) <= 1e-9;
        });
        if (dup || !commutes_with_shears(c, model)) continue;
        delta.components.push_back(c);
    }
    return delta;
}

double dist_to_invariant(const TwoPointState& s, const InvariantSet& delta) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : delta.components) d = std::min(d, torus_distance(c.apply(s.x), s.y));
    return d;
}

RecurrenceProbe probe_recurrence(const Model& model, const InvariantSet& delta, std::size_t n_pairs,
                                 std::size_t steps, double T, std::uint64_t seed, double threshold) {
    RecurrenceProbe out;
    out.min_distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_pairs; ++j) {
        CounterRng rng(seed, tags::pairs, j);
        TwoPointState s{{rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)}, {rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)}};
        if (dist_to_invariant(s, delta) < 0.1) continue;
        ++out.pairs;
        const std::uint64_t key = stream_key(seed, tags::schedule, j);
        bool flagged = false;
        for (std::size_t i = 0; i < steps; ++i) {
            s = two_point_step(s, T * uniform01(key, 2 * i), T * uniform01(key, 2 * i + 1), model);
            const double d = torus_distance(s.x, s.y);
            out.min_distance = std::min(out.min_distance, d);
            if (d < threshold) flagged = true;
        }
        if (flagged) ++out.unexplained;
    }
    return out;
}

}  // namespace shearmix
