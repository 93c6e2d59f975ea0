#include "shearmix/steering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "shearmix/errors.hpp"
#include "shearmix/rng.hpp"

namespace shearmix {

namespace {

// Smallest tau >= 0 moving coordinate `from` to `to` at speed v != 0.
double travel_time(double from, double to, double v) {
    const double d = v > 0.0 ? wrap_angle(to - from) : wrap_angle(from - to);
    return d / std::abs(v);
}

bool in_F(TorusPoint x, const Model& m) { return std::abs(m.f1(x.p)) <= 1e-12 && std::abs(m.f2(x.q)) <= 1e-12; }

constexpr double kSmall = 1e-4;

using Residual = std::function<Eigen::VectorXd(const Eigen::VectorXd& tau)>;

SteeringPlan levenberg_marquardt(const Residual& residual, std::size_t n_params, std::uint64_t seed,
                                 const NumericSteerOptions& opts) {
    SteeringPlan best;
    best.method = SteeringMethod::numeric;
    best.residual = std::numeric_limits<double>::infinity();
    const auto n = static_cast<Eigen::Index>(n_params);
    auto eval = [&](const Eigen::VectorXd& s) { return residual(s.cwiseProduct(s)); };
    for (int start = 0; start < opts.starts; ++start) {
        CounterRng rng(seed, tags::multistart, static_cast<std::uint64_t>(start));
        Eigen::VectorXd s(n);
        for (Eigen::Index i = 0; i < n; ++i) s[i] = std::sqrt(rng.uniform(0.0, opts.init_horizon));
        Eigen::VectorXd r = eval(s);
        double cost = r.squaredNorm();
        double mu = 1e-3;
        for (int it = 0; it < opts.max_iterations && cost > 1e-24; ++it) {
            Eigen::MatrixXd J(r.size(), n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double h = 1e-7 * (1.0 + std::abs(s[i]));
                Eigen::VectorXd sp = s, sm = s;
                sp[i] += h;
                sm[i] -= h;
                J.col(i) = (eval(sp) - eval(sm)) / (2.0 * h);
            }
            const Eigen::MatrixXd JtJ = J.transpose() * J;
            const Eigen::VectorXd g = J.transpose() * r;
            bool improved = false;
            for (int tries = 0; tries < 12 && !improved; ++tries) {
                Eigen::MatrixXd A = JtJ;
                A.diagonal().array() += mu * (JtJ.diagonal().array() + 1e-9);
                const Eigen::VectorXd delta = A.ldlt().solve(-g);
                const Eigen::VectorXd s_new = s + delta;
                const Eigen::VectorXd r_new = eval(s_new);
                const double c_new = r_new.squaredNorm();
                if (std::isfinite(c_new) && c_new < cost) {
                    s = s_new;
                    r = r_new;
                    cost = c_new;
                    mu = std::max(mu / 3.0, 1e-12);
                    improved = true;
                } else {
                    mu *= 4.0;
                }
            }
            if (!improved) break;
        }
        if (std::sqrt(cost) < best.residual) {
            best.residual = std::sqrt(cost);
            const Eigen::VectorXd tau = s.cwiseProduct(s);
            best.legs = Schedule::explicit_steps(std::vector<double>(tau.data(), tau.data() + tau.size()));
        }
        if (best.residual < opts.success) break;
    }
    return best;
}

double direction_angle(const Eigen::Vector2d& u) { return std::atan2(u[1], u[0]); }

// Difference of line directions, reduced to (-pi/2, pi/2].
double line_angle_diff(double a, double b) {
    double d = std::fmod(a - b, kPi);
    if (d > kPi / 2.0) d -= kPi;
    if (d <= -kPi / 2.0) d += kPi;
    return d;
}

}  // namespace

std::string to_string(SteeringMethod m) { return m == SteeringMethod::exact ? "exact" : "numeric"; }

double profile_anchor(const ShearProfile& f) {
    if (f.is_identity()) return kPi;
    constexpr int n = 4096;
    const double h = kTwoPi / n;
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(f(i * h)) > std::abs(f(best * h))) best = i;
    double a = (best - 1) * h;
    double b = (best + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto obj = [&](double z) { return std::abs(f(z)); };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = obj(x1), f2 = obj(x2);
    for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = obj(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = obj(x2);
        }
    }
    // Golden section stalls near sqrt(eps); finish with Newton on f'.
    double z = 0.5 * (a + b);
    for (int it = 0; it < 8; ++it) {
        const double d2 = f(z, 2);
        if (d2 == 0.0) break;
        const double step = f(z, 1) / d2;
        if (!(std::abs(step) < h)) break;
        z -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return wrap_angle(z);
}

Schedule split_schedule(const Schedule& s, double T_cap) {
    if (!(T_cap > 0.0)) throw PreconditionError("split_schedule: T_cap must be positive");
    std::vector<double> out;
    for (std::size_t i = 0; i < s.steps(); ++i) {
        const double t1 = s.horizontal(i);
        const double t2 = s.vertical(i);
        const auto n1 = static_cast<std::size_t>(std::max(1.0, std::ceil(t1 / T_cap)));
        const auto n2 = static_cast<std::size_t>(std::max(1.0, std::ceil(t2 / T_cap)));
        const double h1 = n1 == 1 ? t1 : t1 / static_cast<double>(n1);
        const double h2 = n2 == 1 ? t2 : t2 / static_cast<double>(n2);
        for (std::size_t k = 0; k + 1 < n1; ++k) out.insert(out.end(), {h1, 0.0});
        out.insert(out.end(), {h1, h2});
        for (std::size_t k = 0; k + 1 < n2; ++k) out.insert(out.end(), {0.0, h2});
    }
    Schedule r = s;
    r.durations = std::move(out);
    r.horizon = r.durations.empty() ? 0.0 : *std::max_element(r.durations.begin(), r.durations.end());
    return r;
}

SteeringPlan steer_to(TorusPoint x, TorusPoint target, const Model& model, double T_cap) {
    x = wrap(x);
    target = wrap(target);
    if (in_F(target, model)) throw PreconditionError("steer_to: target lies in F");
    if (in_F(x, model)) throw PreconditionError("steer_to: start lies in F");
    SteeringPlan plan;
    plan.method = SteeringMethod::exact;
    if (torus_distance(x, target) == 0.0) return plan;

    const double q0 = profile_anchor(model.f2);
    const double p0 = profile_anchor(model.f1);
    std::vector<double> legs;
    TorusPoint cur = x;

    if (std::abs(model.f1(cur.p)) < kSmall) {
        // Vertical move until the horizontal shear is usable again.
        const double v = model.f2(cur.q);
        if (v == 0.0) throw NumericalIntegrityError("steer_to: both shears vanish at the start");
        const double span = kTwoPi / std::abs(v);
        constexpr int grid = 10000;
        auto ok = [&](double t) { return std::abs(model.f1(cur.p + t * v)) >= kSmall; };
        int k = 1;
        while (k <= grid && !ok(span * k / grid)) ++k;
        if (k > grid) throw NumericalIntegrityError("steer_to: no usable preparatory move");
        double lo = span * (k - 1) / grid;
        double hi = span * k / grid;
        for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (ok(mid)) hi = mid;
            else lo = mid;
        }
        legs.insert(legs.end(), {0.0, hi});
        cur = step_point(cur, 0.0, hi, model);
    }

    // To the anchor.
    const double t1 = travel_time(cur.q, q0, model.f1(cur.p));
    const double t2 = travel_time(cur.p, p0, model.f2(q0));
    std::vector<double> via{t1, t2};

    // From the anchor to the target.
    if (std::abs(model.f2(target.q)) >= kSmall) {
        via.push_back(travel_time(q0, target.q, model.f1(p0)));
        via.push_back(travel_time(p0, target.p, model.f2(target.q)));
    } else {
        via.insert(via.end(), {0.0, travel_time(p0, target.p, model.f2(q0))});
        via.insert(via.end(), {travel_time(q0, target.q, model.f1(target.p)), 0.0});
    }

    // A single step works whenever both shears are usable along the way; take
    // it unless it needs more total time than the anchor route.
    if (legs.empty() && std::abs(model.f2(target.q)) >= kSmall) {
        const double d1 = travel_time(x.q, target.q, model.f1(x.p));
        const double d2 = travel_time(x.p, target.p, model.f2(target.q));
        double via_total = 0.0;
        for (double t : via) via_total += t;
        if (d1 + d2 <= via_total + 1e-12) via = {d1, d2};
    }
    legs.insert(legs.end(), via.begin(), via.end());

    plan.legs = split_schedule(Schedule::explicit_steps(std::move(legs)), T_cap);
    plan.residual = torus_distance(run_schedule(x, plan.legs, model), target);
    return plan;
}

SteeringPlan numeric_steer(const Model& model, const ProjectiveState& start, const ProjectiveState& target,
                           std::size_t n_steps, std::uint64_t seed, NumericSteerOptions opts) {
    if (same_projective(start, target, 0.0)) return {Schedule{}, 0.0, SteeringMethod::numeric};
    const double theta_t = direction_angle(target.u);
    auto residual = [&](const Eigen::VectorXd& tau) {
        ProjectiveState s = start;
        for (std::size_t i = 0; i < n_steps; ++i) s = projective_step(s, tau[2 * i], tau[2 * i + 1], model);
        Eigen::VectorXd r(3);
        r << angle_diff(s.x.q, target.x.q), angle_diff(s.x.p, target.x.p),
            line_angle_diff(direction_angle(s.u), theta_t);
        return r;
    };
    return levenberg_marquardt(residual, 2 * n_steps, seed, opts);
}

SteeringPlan numeric_steer(const Model& model, const TwoPointState& start, const TwoPointState& target,
                           std::size_t n_steps, std::uint64_t seed, NumericSteerOptions opts) {
    const InvariantSet delta = build_invariant_set(model);
    if (dist_to_invariant(target, delta) < 1e-6) throw PreconditionError("numeric_steer: target lies on the invariant set");
    if (torus_distance(start.x, target.x) == 0.0 && torus_distance(start.y, target.y) == 0.0)
        return {Schedule{}, 0.0, SteeringMethod::numeric};
    auto residual = [&](const Eigen::VectorXd& tau) {
        TwoPointState s = start;
        for (std::size_t i = 0; i < n_steps; ++i) s = two_point_step(s, tau[2 * i], tau[2 * i + 1], model);
        Eigen::VectorXd r(4);
        r << angle_diff(s.x.q, target.x.q), angle_diff(s.x.p, target.x.p), angle_diff(s.y.q, target.y.q),
            angle_diff(s.y.p, target.y.p);
        return r;
    };
    return levenberg_marquardt(residual, 2 * n_steps, seed, opts);
}

}  // namespace shearmix
