#pragma once
/**
 * @file vec2.hpp
 * @brief Minimal 2D vector used throughout the billiard code.
 *
 * Plain value type with the handful of operations the geometry and
 * dynamics need: arithmetic, dot/cross products, norm and normalization.
 * Callers own tolerances.
 */

#include <cmath>

namespace billiards {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

    Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    /// z-component of the 3D cross product.
    constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }

    /// Returns {0,0} for a zero vector.
    Vec2 normalized() const {
        const double n = norm();
        if (n == 0.0) return {0.0, 0.0};
        return {x / n, y / n};
    }

    /// Left-hand perpendicular (rotated +90 degrees).
    constexpr Vec2 perp() const { return {-y, x}; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace billiards
