#pragma once

#include <cmath>
#include <numbers>

namespace shearmix {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// a - b reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = wrap_angle(a - b);
    return d > kPi ? d - kTwoPi : d;
}

/// Quotient-metric distance on the circle.
inline double circle_distance(double a, double b) { return std::abs(angle_diff(a, b)); }

struct TorusPoint {
    double q = 0.0;
    double p = 0.0;
};

inline TorusPoint wrap(TorusPoint x) { return {wrap_angle(x.q), wrap_angle(x.p)}; }

/// Euclidean quotient metric on T^2.
inline double torus_distance(TorusPoint a, TorusPoint b) {
    return std::hypot(angle_diff(a.q, b.q), angle_diff(a.p, b.p));
}

}  // namespace shearmix
