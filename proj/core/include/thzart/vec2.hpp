#pragma once

#include <cmath>

namespace thzart {

/// Plain 2D vector in millimetres (or dimensionless for directions).
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

inline Vec2 normalized(const Vec2& v) { return v / norm(v); }

/// Counter-clockwise quarter turn.
constexpr Vec2 rotate_ccw(const Vec2& v) { return {-v.y, v.x}; }

/// Clockwise quarter turn.
constexpr Vec2 rotate_cw(const Vec2& v) { return {v.y, -v.x}; }

inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// omega(phi) = (cos phi, sin phi): the offset direction of a parallel-beam ray.
inline Vec2 omega(double phi) { return {std::cos(phi), std::sin(phi)}; }

/// omega_perp(phi) = (-sin phi, cos phi): the propagation direction of the ray.
inline Vec2 omega_perp(double phi) { return {-std::sin(phi), std::cos(phi)}; }

inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

}  // namespace thzart
