#pragma once

// Forward-mode dual numbers.  Nesting Dual<Dual<double>> gives exact
// directional derivatives of derivatives, which is what bracket words need.

#include <cmath>
#include <type_traits>

namespace shearmix {

template <class T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(double c) : v(c), d(0.0) {}
    Dual(T value, T deriv) : v(value), d(deriv) {}
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
    return value_of(x.v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }

template <class T>
Dual<T> operator+(const Dual<T>& a, double c) { return {a.v + c, a.d}; }
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) { return {a.v + c, a.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) { return {a.v - c, a.d}; }
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) { return {c - a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) { return {a.v * c, a.d * c}; }
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) { return {a.v * c, a.d * c}; }

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { return a = a + b; }
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { return a = a - b; }

template <class T>
Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -(sin(a.v) * a.d)};
}

}  // namespace shearmix
