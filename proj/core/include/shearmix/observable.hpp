#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace shearmix {

/// A bounded scalar on T^2 used as an initial condition or test function.
class Observable {
public:
    enum class Kind { fourier, checkerboard };

    struct Mode {
        int kq = 0;
        int kp = 0;
        double a_cos = 0.0;
        double a_sin = 0.0;
    };

    /// amplitude * sin(q)
    static Observable sine_q(double amplitude = 2.0);
    /// +-amplitude on a cells x cells board.
    static Observable checkerboard(double amplitude = 3.0, int cells = 2);
    static Observable fourier(std::vector<Mode> modes);
    static Observable zero();
    /// "sine:2", "checkerboard:3", "checkerboard:3:4", "zero".
    static Observable parse(std::string_view spec);

    double operator()(double q, double p) const;
    Kind kind() const { return kind_; }
    /// Supremum of |u| (an upper bound for multi-mode Fourier sums).
    double sup_norm() const;
    /// Midpoint-rule mean over an n x n grid.
    double quadrature_mean(int n = 512) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::fourier;
    std::vector<Mode> modes_;
    double amplitude_ = 0.0;
    int cells_ = 2;
    std::string label_;
};

}  // namespace shearmix
