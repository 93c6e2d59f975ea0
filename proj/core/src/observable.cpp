#include "shearmix/observable.hpp"

#include <cmath>
#include <sstream>

#include "shearmix/errors.hpp"
#include "shearmix/stats.hpp"
#include "shearmix/torus.hpp"

namespace shearmix {

Observable Observable::sine_q(double amplitude) {
    Observable o = fourier({{1, 0, 0.0, amplitude}});
    std::ostringstream os;
    os.precision(17);
    os << "sine:" << amplitude;
    o.label_ = os.str();
    return o;
}

Observable Observable::checkerboard(double amplitude, int cells) {
    if (cells < 2 || cells % 2 != 0) throw ConfigError("u0: checkerboard needs an even cell count >= 2");
    Observable o;
    o.kind_ = Kind::checkerboard;
    o.amplitude_ = amplitude;
    o.cells_ = cells;
    std::ostringstream os;
    os.precision(17);
    os << "checkerboard:" << amplitude << ":" << cells;
    o.label_ = os.str();
    return o;
}

Observable Observable::fourier(std::vector<Mode> modes) {
    Observable o;
    o.kind_ = Kind::fourier;
    o.modes_ = std::move(modes);
    o.label_ = "fourier";
    return o;
}

Observable Observable::zero() {
    Observable o = fourier({});
    o.label_ = "zero";
    return o;
}

Observable Observable::parse(std::string_view spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    try {
        if (parts[0] == "zero" && parts.size() == 1) return zero();
        if (parts[0] == "sine" && parts.size() <= 2) return sine_q(parts.size() == 2 ? std::stod(parts[1]) : 2.0);
        if (parts[0] == "checkerboard" && parts.size() <= 3)
            return checkerboard(parts.size() >= 2 ? std::stod(parts[1]) : 3.0, parts.size() == 3 ? std::stoi(parts[2]) : 2);
    } catch (const std::logic_error&) {
        // fall through to the diagnostic below
    }
    throw ConfigError("u0: expected sine[:amp], checkerboard[:amp[:cells]] or zero, got '" + std::string(spec) + "'");
}

double Observable::operator()(double q, double p) const {
    if (kind_ == Kind::checkerboard) {
        const double w = kTwoPi / cells_;
        const auto i = static_cast<long>(std::floor(wrap_angle(q) / w));
        const auto j = static_cast<long>(std::floor(wrap_angle(p) / w));
        return ((i + j) % 2 == 0) ? amplitude_ : -amplitude_;
    }
    double v = 0.0;
    for (const auto& m : modes_) {
        const double arg = m.kq * q + m.kp * p;
        if (m.a_cos != 0.0) v += m.a_cos * std::cos(arg);
        if (m.a_sin != 0.0) v += m.a_sin * std::sin(arg);
    }
    return v;
}

double Observable::sup_norm() const {
    if (kind_ == Kind::checkerboard) return std::abs(amplitude_);
    double s = 0.0;
    for (const auto& m : modes_) s += std::hypot(m.a_cos, m.a_sin);
    return s;
}

double Observable::quadrature_mean(int n) const {
    const double h = kTwoPi / n;
    CompensatedSum acc;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc.add((*this)((i + 0.5) * h, (j + 0.5) * h));
    return acc.value() / (static_cast<double>(n) * n);
}

std::string Observable::describe() const { return label_; }

}  // namespace shearmix
