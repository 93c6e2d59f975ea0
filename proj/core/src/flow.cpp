#include "shearmix/flow.hpp"

#include <algorithm>

#include "shearmix/errors.hpp"
#include "shearmix/rng.hpp"

namespace shearmix {

ShearResult shear_step(TorusPoint x, double tau, Direction dir, const Model& model) {
    ShearResult r;
    r.jac.setIdentity();
    if (dir == Direction::horizontal) {
        r.x = {wrap_angle(x.q + tau * model.f1(x.p)), x.p};
        r.jac(0, 1) = tau * model.f1(x.p, 1);
    } else {
        r.x = {x.q, wrap_angle(x.p + tau * model.f2(x.q))};
        r.jac(1, 0) = tau * model.f2(x.q, 1);
    }
    return r;
}

TorusPoint shear_point(TorusPoint x, double tau, Direction dir, const Model& model) {
    if (dir == Direction::horizontal) return {wrap_angle(x.q + tau * model.f1(x.p)), x.p};
    return {x.q, wrap_angle(x.p + tau * model.f2(x.q))};
}

ShearResult step(TorusPoint x, double tau1, double tau2, const Model& model) {
    const ShearResult h = shear_step(x, tau1, Direction::horizontal, model);
    const ShearResult v = shear_step(h.x, tau2, Direction::vertical, model);
    return {v.x, v.jac * h.jac};
}

TorusPoint step_point(TorusPoint x, double tau1, double tau2, const Model& model) {
    return shear_point(shear_point(x, tau1, Direction::horizontal, model), tau2, Direction::vertical, model);
}

TorusPoint inverse_step(TorusPoint x, double tau1, double tau2, const Model& model) {
    return shear_point(shear_point(x, -tau2, Direction::vertical, model), -tau1, Direction::horizontal, model);
}

Schedule Schedule::explicit_steps(std::vector<double> durations) {
    if (durations.size() % 2 != 0) throw PreconditionError("schedule: odd number of durations");
    Schedule s;
    s.horizon = 0.0;
    for (double d : durations) {
        if (!(d >= 0.0)) throw PreconditionError("schedule: negative or NaN duration");
        s.horizon = std::max(s.horizon, d);
    }
    s.durations = std::move(durations);
    return s;
}

double schedule_duration(std::uint64_t seed, std::uint64_t sample, std::uint64_t i, double T) {
    return T * uniform01(stream_key(seed, tags::schedule, sample), i);
}

Schedule sample_schedule(std::uint64_t seed, std::size_t m, double T, std::uint64_t sample) {
    if (!(T >= 0.0)) throw PreconditionError("sample_schedule: T must be >= 0");
    Schedule s;
    s.horizon = T;
    s.seed = seed;
    s.durations.resize(2 * m);
    const std::uint64_t key = stream_key(seed, tags::schedule, sample);
    for (std::size_t i = 0; i < 2 * m; ++i) s.durations[i] = T * uniform01(key, i);
    return s;
}

TorusPoint run_schedule(TorusPoint x, const Schedule& s, const Model& model) {
    for (std::size_t i = 0; i < s.steps(); ++i) x = step_point(x, s.horizontal(i), s.vertical(i), model);
    return x;
}

TorusPoint run_schedule_inverse(TorusPoint x, const Schedule& s, const Model& model) {
    for (std::size_t i = s.steps(); i-- > 0;) x = inverse_step(x, s.horizontal(i), s.vertical(i), model);
    return x;
}

}  // namespace shearmix
