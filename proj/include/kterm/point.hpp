#pragma once

#include <array>
#include <cmath>
#include <initializer_list>

namespace kterm {

// Point in R^d for d in {1, 2}.
struct Point {
    int dim = 1;
    std::array<double, 2> v{0.0, 0.0};

    Point() = default;
    Point(double x) : dim(1), v{x, 0.0} {}
    Point(double x, double y) : dim(2), v{x, y} {}

    double operator[](int i) const { return v[i]; }
    double& operator[](int i) { return v[i]; }

    double norm() const { return dim == 1 ? std::fabs(v[0]) : std::hypot(v[0], v[1]); }
    double norm_inf() const { return dim == 1 ? std::fabs(v[0]) : std::fmax(std::fabs(v[0]), std::fabs(v[1])); }
    double dot(const Point& o) const { return dim == 1 ? v[0] * o.v[0] : v[0] * o.v[0] + v[1] * o.v[1]; }
};

inline Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a.v[i] += b.v[i];
    return a;
}
inline Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a.v[i] -= b.v[i];
    return a;
}
inline Point operator*(double s, Point a) {
    for (int i = 0; i < a.dim; ++i) a.v[i] *= s;
    return a;
}
inline Point operator/(Point a, double s) {
    for (int i = 0; i < a.dim; ++i) a.v[i] /= s;
    return a;
}
inline Point operator-(Point a) { return -1.0 * a; }

} // namespace kterm
