#pragma once

#include <cmath>

namespace noether2d {

// First-order forward-mode number carrying partial derivatives with respect
// to the three physical coordinates (x, y, t).  Arithmetic propagates the
// gradient exactly, so any quantity assembled from Dual3 values comes with
// its first partials at machine precision.
struct Dual3 {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dt = 0.0;

    Dual3() = default;
    Dual3(double value) : v(value) {}  // NOLINT: implicit constant lift
    Dual3(double value, double ddx, double ddy, double ddt)
        : v(value), dx(ddx), dy(ddy), dt(ddt) {}

    static Dual3 var_x(double value) { return {value, 1.0, 0.0, 0.0}; }
    static Dual3 var_y(double value) { return {value, 0.0, 1.0, 0.0}; }
    static Dual3 var_t(double value) { return {value, 0.0, 0.0, 1.0}; }
};

inline Dual3 operator+(const Dual3& a, const Dual3& b) {
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dt + b.dt};
}
inline Dual3 operator-(const Dual3& a, const Dual3& b) {
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dt - b.dt};
}
inline Dual3 operator-(const Dual3& a) { return {-a.v, -a.dx, -a.dy, -a.dt}; }
inline Dual3 operator*(const Dual3& a, const Dual3& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dt * b.v + a.v * b.dt};
}
inline Dual3 operator/(const Dual3& a, const Dual3& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q,
            (a.dx - q * b.dx) * inv,
            (a.dy - q * b.dy) * inv,
            (a.dt - q * b.dt) * inv};
}

inline Dual3& operator+=(Dual3& a, const Dual3& b) { return a = a + b; }
inline Dual3& operator-=(Dual3& a, const Dual3& b) { return a = a - b; }
inline Dual3& operator*=(Dual3& a, const Dual3& b) { return a = a * b; }
inline Dual3& operator/=(Dual3& a, const Dual3& b) { return a = a / b; }

// chain(f(u), f'(u)·du) helper
inline Dual3 lift(const Dual3& u, double f, double dfdu) {
    return {f, dfdu * u.dx, dfdu * u.dy, dfdu * u.dt};
}

inline Dual3 sin(const Dual3& u) { return lift(u, std::sin(u.v), std::cos(u.v)); }
inline Dual3 cos(const Dual3& u) { return lift(u, std::cos(u.v), -std::sin(u.v)); }
inline Dual3 tan(const Dual3& u) {
    const double t = std::tan(u.v);
    return lift(u, t, 1.0 + t * t);
}
inline Dual3 exp(const Dual3& u) {
    const double e = std::exp(u.v);
    return lift(u, e, e);
}
inline Dual3 log(const Dual3& u) { return lift(u, std::log(u.v), 1.0 / u.v); }
inline Dual3 sqrt(const Dual3& u) {
    const double r = std::sqrt(u.v);
    return lift(u, r, 0.5 / r);
}
inline Dual3 atan(const Dual3& u) {
    return lift(u, std::atan(u.v), 1.0 / (1.0 + u.v * u.v));
}
inline Dual3 pow(const Dual3& u, double c) {
    return lift(u, std::pow(u.v, c), c * std::pow(u.v, c - 1.0));
}

// Scalar part, overloaded so templated code can inspect the value of either
// a plain double or a dual.
inline double scalar_value(double x) { return x; }
inline double scalar_value(const Dual3& x) { return x.v; }

}  // namespace noether2d
