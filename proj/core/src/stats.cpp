#include "shearmix/stats.hpp"

#include <stdexcept>

namespace shearmix {

double SampleStats::variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = sum_.value() / n;
    const double v = (sq_.value() - n * m * m) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
}

double SampleStats::stderr_mean() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    LinearFit fit;
    fit.n = x.size();
    if (fit.n < 2) return fit;
    const double n = static_cast<double>(fit.n);
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < fit.n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < fit.n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (sxx.value() == 0.0) return fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy.value() > 0.0 ? (sxy.value() * sxy.value()) / (sxx.value() * syy.value()) : 1.0;
    return fit;
}

}  // namespace shearmix
