#include "shearmix/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "shearmix/errors.hpp"

namespace shearmix {

namespace {

constexpr double kZeroTol = 1e-10;
constexpr double kIdentityTol = 1e-9;

// Bisection for a sign change of g on [a, b]; g(a) and g(b) have opposite signs.
double bisect(const std::function<double(double)>& g, double a, double b, double ga) {
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Sort and merge angles closer than tol on the circle.
std::vector<double> dedupe_angles(std::vector<double> v, double tol) {
    for (double& a : v) a = wrap_angle(a);
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double a : v) {
        if (out.empty() || a - out.back() > tol) out.push_back(a);
    }
    if (out.size() > 1 && out.front() + kTwoPi - out.back() <= tol) out.pop_back();
    return out;
}

// Fixed sample of t-values used when checking functional identities.
std::vector<double> probe_points(int n, double offset) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = kTwoPi * (j + offset) / n;
    return t;
}

bool identity_holds(const std::function<double(double)>& residual, const std::vector<double>& ts) {
    return std::all_of(ts.begin(), ts.end(), [&](double t) { return std::abs(residual(t)) <= kIdentityTol; });
}

// Zeros of c -> E(c) located as grid minima of E refined by bisecting E'.
std::vector<double> energy_zeros(const std::function<double(double)>& energy,
                                 const std::function<double(double)>& denergy,
                                 const std::function<double(double, double)>& residual) {
    constexpr int n = 4096;
    const double h = kTwoPi / n;
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = energy(i * h);
    const auto verify_t = probe_points(64, 0.7236);
    std::vector<double> found;
    for (int i = 0; i < n; ++i) {
        const double em = e[static_cast<std::size_t>((i + n - 1) % n)];
        const double e0 = e[static_cast<std::size_t>(i)];
        const double ep = e[static_cast<std::size_t>((i + 1) % n)];
        if (!(e0 <= em && e0 <= ep)) continue;
        double c = i * h;
        const double a = c - h;
        const double b = c + h;
        const double da = denergy(a);
        const double db = denergy(b);
        if (da < 0.0 && db > 0.0) c = bisect(denergy, a, b, da);
        if (identity_holds([&](double t) { return residual(c, t); }, verify_t)) found.push_back(c);
    }
    return dedupe_angles(std::move(found), 1e-9);
}

}  // namespace

ShearProfile ShearProfile::trig(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    if (cos_coeffs.empty()) cos_coeffs.push_back(0.0);
    for (double c : cos_coeffs)
        if (!std::isfinite(c)) throw ConfigError("cos_coeffs: non-finite coefficient");
    for (double s : sin_coeffs)
        if (!std::isfinite(s)) throw ConfigError("sin_coeffs: non-finite coefficient");
    const std::size_t k = std::max(cos_coeffs.size() - 1, sin_coeffs.size());
    cos_coeffs.resize(k + 1, 0.0);
    sin_coeffs.resize(k, 0.0);
    std::size_t deg = k;
    while (deg > 0 && cos_coeffs[deg] == 0.0 && sin_coeffs[deg - 1] == 0.0) --deg;
    if (deg == 0) throw ConfigError("coefficients: trig polynomial is constant");
    cos_coeffs.resize(deg + 1);
    sin_coeffs.resize(deg);
    ShearProfile f;
    f.kind_ = Kind::trig_poly;
    f.cos_ = std::move(cos_coeffs);
    f.sin_ = std::move(sin_coeffs);
    return f;
}

ShearProfile ShearProfile::circle_identity() {
    ShearProfile f;
    f.kind_ = Kind::circle_identity;
    return f;
}

ShearProfile ShearProfile::sine(int k, double amplitude) {
    if (k < 1) throw ConfigError("sine: harmonic must be >= 1");
    std::vector<double> s(static_cast<std::size_t>(k), 0.0);
    s.back() = amplitude;
    return trig({0.0}, std::move(s));
}

int ShearProfile::degree() const {
    return is_identity() ? 1 : static_cast<int>(cos_.size()) - 1;
}

std::string ShearProfile::describe() const {
    if (is_identity()) return "identity";
    std::ostringstream os;
    os.precision(17);
    os << "trig(cos=[";
    for (std::size_t i = 0; i < cos_.size(); ++i) os << (i ? "," : "") << cos_[i];
    os << "],sin=[";
    for (std::size_t i = 0; i < sin_.size(); ++i) os << (i ? "," : "") << sin_[i];
    os << "])";
    return os.str();
}

ZeroSet zero_set(const ShearProfile& f, int order) {
    if (order != 0 && order != 1) throw PreconditionError("zero_set: order must be 0 or 1");
    ZeroSet zs;
    zs.tolerance = kZeroTol;
    if (f.is_identity()) {
        if (order == 0) zs.roots = {0.0};
        return zs;
    }
    const int n = std::max(4096, 64 * f.degree());
    const double h = kTwoPi / n;
    auto g = [&](double z) { return f(z, order); };
    auto dg = [&](double z) { return f(z, order + 1); };
    std::vector<double> vals(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) vals[static_cast<std::size_t>(i)] = g(i * h);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        const double a = i * h;
        const double ga = vals[static_cast<std::size_t>(i)];
        const double gb = vals[static_cast<std::size_t>(i) + 1];
        if (ga == 0.0) {
            roots.push_back(a);
            continue;
        }
        if (ga * gb < 0.0) {
            roots.push_back(bisect(g, a, a + h, ga));
            continue;
        }
        // Tangential zero: a local minimum of |g| without a sign change.
        const double gm = vals[static_cast<std::size_t>((i + n - 1) % n)];
        if (std::abs(ga) <= std::abs(gm) && std::abs(ga) <= std::abs(gb) && ga * gm > 0.0) {
            const double lo = a - h;
            const double hi = a + h;
            const double dlo = dg(lo);
            const double dhi = dg(hi);
            double z = a;
            if (dlo * dhi < 0.0) z = bisect(dg, lo, hi, dlo);
            if (std::abs(g(z)) <= kZeroTol) roots.push_back(z);
        }
    }
    zs.roots = dedupe_angles(std::move(roots), 1e-9);
    if (zs.roots.size() > static_cast<std::size_t>(2 * f.degree()))
        throw NumericalIntegrityError("zero_set: root count exceeds 2*degree");
    return zs;
}

H1Result check_h1(const ShearProfile& f) {
    const auto c0 = zero_set(f, 0).roots;
    const auto c1 = zero_set(f, 1).roots;
    H1Result r;
    r.min_gap = std::numeric_limits<double>::infinity();
    for (double a : c0)
        for (double b : c1) r.min_gap = std::min(r.min_gap, circle_distance(a, b));
    r.pass = r.min_gap > 1e-6;
    return r;
}

SymmetryData symmetry_data(const ShearProfile& f) {
    SymmetryData s;
    if (f.is_identity()) {
        s.periods = {0.0};
        s.odd_centers = {0.0, kPi};
        return s;
    }
    const auto ts = probe_points(64, 0.3819);
    for (int d = f.degree(); d >= 2; --d) {
        const double P = kTwoPi / d;
        if (identity_holds([&](double t) { return f(t + P) - f(t); }, ts)) {
            s.fundamental_period = P;
            break;
        }
    }
    const int count = static_cast<int>(std::lround(kTwoPi / s.fundamental_period));
    for (int k = 0; k < count; ++k) s.periods.push_back(k * s.fundamental_period);
    // An antiperiod A has 2A a period, so A is an odd multiple of half the fundamental period.
    for (int k = 0; k < count; ++k) {
        const double A = (k + 0.5) * s.fundamental_period;
        if (identity_holds([&](double t) { return f(t + A) + f(t); }, ts)) s.antiperiods.push_back(A);
    }

    auto even_res = [&](double c, double t) { return f(2.0 * c - t) - f(t); };
    auto odd_res = [&](double c, double t) { return f(2.0 * c - t) + f(t); };
    auto energy = [&](const std::function<double(double, double)>& res) {
        return [&, res](double c) {
            double e = 0.0;
            for (double t : ts) {
                const double r = res(c, t);
                e += r * r;
            }
            return e;
        };
    };
    auto denergy = [&](double sign) {
        return [&, sign](double c) {
            double e = 0.0;
            for (double t : ts) e += 4.0 * (f(2.0 * c - t) + sign * f(t)) * f(2.0 * c - t, 1);
            return e;
        };
    };
    s.even_axes = energy_zeros(energy(even_res), denergy(-1.0), even_res);
    s.odd_centers = energy_zeros(energy(odd_res), denergy(+1.0), odd_res);
    return s;
}

double distortion_constant(const ShearProfile& f) {
    if (f.is_identity()) return 1.0;
    if (!check_h1(f).pass) throw PreconditionError("distortion_constant: (H1) fails, ratio diverges");
    const auto roots = zero_set(f, 0).roots;
    if (roots.empty()) throw PreconditionError("distortion_constant: profile has no zeros");
    auto dist = [&](double z) {
        double d = std::numeric_limits<double>::infinity();
        for (double r : roots) d = std::min(d, circle_distance(z, r));
        return d;
    };
    // Both ratios folded into one: max(|f|/d, d/|f|).
    auto ratio = [&](double z) {
        const double d = dist(z);
        const double v = std::abs(f(z));
        if (d < 1e-9) {
            // Limit at a simple root.
            const double s = std::abs(f(z, 1));
            return std::max(s, 1.0 / s);
        }
        return std::max(v / d, d / v);
    };
    constexpr int n = 1 << 16;
    const double h = kTwoPi / n;
    double best = 1.0;
    int best_i = 0;
    for (int i = 0; i < n; ++i) {
        const double r = ratio(i * h);
        if (r > best) {
            best = r;
            best_i = i;
        }
    }
    // Golden-section refinement of the maximizer.
    double a = (best_i - 1) * h;
    double b = (best_i + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double r1 = ratio(x1);
    double r2 = ratio(x2);
    for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
        if (r1 > r2) {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - g * (b - a);
            r1 = ratio(x1);
        } else {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + g * (b - a);
            r2 = ratio(x2);
        }
    }
    return std::max({best, r1, r2});
}

Model pierrehumbert() { return {"pierrehumbert", ShearProfile::sine(), ShearProfile::sine()}; }

Model chirikov_analog() { return {"chirikov", ShearProfile::sine(), ShearProfile::circle_identity()}; }

std::vector<TorusPoint> critical_points(const Model& model) {
    std::vector<TorusPoint> out;
    const auto cq = zero_set(model.f2, 0).roots;
    const auto cp = zero_set(model.f1, 0).roots;
    for (double q : cq)
        for (double p : cp) out.push_back({q, p});
    return out;
}

}  // namespace shearmix
