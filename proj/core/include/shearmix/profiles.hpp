#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "shearmix/dual.hpp"
#include "shearmix/torus.hpp"

namespace shearmix {

/// Analytic circle function: a trigonometric polynomial
///   f(z) = a0 + sum_k a_k cos(kz) + b_k sin(kz)
/// or the circle identity (the representative of z in [0, 2pi)).
class ShearProfile {
public:
    enum class Kind { trig_poly, circle_identity };

    /// cos_coeffs = (a0, a1, ..., aK), sin_coeffs = (b1, ..., bK).
    /// Throws ConfigError for non-finite or constant input.
    static ShearProfile trig(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    static ShearProfile circle_identity();
    /// amplitude * sin(k z)
    static ShearProfile sine(int k = 1, double amplitude = 1.0);

    Kind kind() const { return kind_; }
    bool is_identity() const { return kind_ == Kind::circle_identity; }
    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }
    /// Highest harmonic with a nonzero coefficient (1 for the identity).
    int degree() const;

    template <class T>
    T eval(const T& z, int order = 0) const;
    double operator()(double z, int order = 0) const { return eval<double>(z, order); }

    std::string describe() const;
    bool operator==(const ShearProfile&) const = default;

private:
    Kind kind_ = Kind::trig_poly;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

inline double eval(const ShearProfile& f, double z, int order = 0) { return f(z, order); }

struct ZeroSet {
    std::vector<double> roots;  // sorted, in [0, 2pi)
    double tolerance = 1e-10;
};

/// Zeros of f (order 0) or f' (order 1).  Throws NumericalIntegrityError
/// if more than 2*degree roots are found.
ZeroSet zero_set(const ShearProfile& f, int order);

struct H1Result {
    bool pass = false;
    double min_gap = 0.0;  // +inf when either zero set is empty
};

/// C_f and C_f' must be disjoint.
H1Result check_h1(const ShearProfile& f);

struct SymmetryData {
    double fundamental_period = kTwoPi;  // kTwoPi: no period beyond 2pi
    std::vector<double> periods;         // multiples of the fundamental period in [0, 2pi), 0 included
    std::vector<double> antiperiods;     // A with f(t + A) = -f(t)
    std::vector<double> even_axes;       // c with f(2c - t) = f(t)
    std::vector<double> odd_centers;     // c with f(2c - t) = -f(t)

    bool has_nontrivial_period() const { return periods.size() > 1; }
};

SymmetryData symmetry_data(const ShearProfile& f);

/// Smallest K >= 1 with d(z, C_f)/K <= |f(z)| <= K d(z, C_f).
/// Throws PreconditionError when (H1) fails or f has no zeros.
double distortion_constant(const ShearProfile& f);

struct Model {
    std::string name;
    ShearProfile f1;  // horizontal shear profile, evaluated at p
    ShearProfile f2;  // vertical shear profile, evaluated at q
};

Model pierrehumbert();
Model chirikov_analog();

/// F = C_f2 x C_f1, the common zero set of both shears.
std::vector<TorusPoint> critical_points(const Model& model);

// ---------------------------------------------------------------------------

template <class T>
T ShearProfile::eval(const T& z, int order) const {
    using std::cos;
    using std::sin;
    if (kind_ == Kind::circle_identity) {
        if (order == 0) {
            const double zv = value_of(z);
            return z - (zv - wrap_angle(zv));
        }
        return T(order == 1 ? 1.0 : 0.0);
    }
    T acc = T(order == 0 ? cos_[0] : 0.0);
    const int n = static_cast<int>(cos_.size()) - 1;
    for (int k = 1; k <= n; ++k) {
        const double a = cos_[static_cast<std::size_t>(k)];
        const double b = sin_[static_cast<std::size_t>(k - 1)];
        if (a == 0.0 && b == 0.0) continue;
        const double scale = std::pow(static_cast<double>(k), order);
        const T kz = static_cast<double>(k) * z;
        const T c = cos(kz);
        const T s = sin(kz);
        switch (order % 4) {
            case 0: acc = acc + (a * scale) * c + (b * scale) * s; break;
            case 1: acc = acc - (a * scale) * s + (b * scale) * c; break;
            case 2: acc = acc - (a * scale) * c - (b * scale) * s; break;
            default: acc = acc + (a * scale) * s - (b * scale) * c; break;
        }
    }
    return acc;
}

}  // namespace shearmix
