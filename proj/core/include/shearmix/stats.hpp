#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace shearmix {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean and standard error, accumulated in the order values are added.
class SampleStats {
public:
    void add(double x) {
        sum_.add(x);
        sq_.add(x * x);
        ++n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return n_ ? sum_.value() / static_cast<double>(n_) : 0.0; }
    double variance() const;
    double stderr_mean() const;

private:
    CompensatedSum sum_;
    CompensatedSum sq_;
    std::size_t n_ = 0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace shearmix
