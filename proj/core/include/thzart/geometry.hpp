#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "thzart/vec2.hpp"

namespace thzart::geometry {

inline constexpr double kDefaultTolerance = 1e-6;  // mm

/// Straight interface from `a` to `b`, parametrised on sigma in [0, 1].
struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Circular interface c + r (cos sigma, sin sigma), sigma in [from, to] (radians).
struct Arc {
    Vec2 center;
    double radius{0.0};
    double from{0.0};
    double to{0.0};
};

/// One a-priori interface curve. The parametrisation direction fixes the
/// orientation of the normal, n = (-xi_2', xi_1') / |xi'|.
class InterfaceCurve {
public:
    using Shape = std::variant<Segment, Arc>;

    static InterfaceCurve segment(Vec2 a, Vec2 b);
    static InterfaceCurve arc(Vec2 center, double radius, double from, double to);
    static InterfaceCurve circle(Vec2 center, double radius);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] bool is_segment() const { return std::holds_alternative<Segment>(shape_); }
    [[nodiscard]] bool is_closed() const;

    [[nodiscard]] double param_min() const;
    [[nodiscard]] double param_max() const;

    [[nodiscard]] Vec2 point_at(double sigma) const;
    [[nodiscard]] Vec2 tangent_at(double sigma) const;

    /// Parameter of the curve point closest to `p`.
    [[nodiscard]] double closest_param(Vec2 p) const;
    [[nodiscard]] double distance_to(Vec2 p) const;

    /// Largest distance of any curve point from the origin.
    [[nodiscard]] double max_radius() const;

    /// Rigid rotation about the origin.
    [[nodiscard]] InterfaceCurve rotated(double angle) const;

    /// Ray parameters t (ray = origin + t * direction) where the ray meets the
    /// curve, paired with the curve parameter, in ascending t. `tol` widens the
    /// parameter range so endpoint hits are not lost to rounding.
    struct Crossing {
        double t;
        double sigma;
    };
    [[nodiscard]] std::vector<Crossing> crossings(Vec2 origin, Vec2 direction, double tol) const;

private:
    explicit InterfaceCurve(Shape shape) : shape_(shape) {}
    Shape shape_;
};

/// Unit normal at `sigma`. Throws DomainError when sigma is outside the
/// parameter range.
Vec2 normal_at(const InterfaceCurve& curve, double sigma);

/// Normalised sum of unit normals (the mean orientation at a corner).
/// Throws DegenerateCornerError if the sum is shorter than `tol`.
Vec2 corner_normal(std::span<const Vec2> normals, double tol = kDefaultTolerance);

/// A point shared by two or more curves.
struct Corner {
    Vec2 point;
    std::vector<std::size_t> curves;
    /// Averaged unit normal; empty when the contributing normals cancel.
    std::optional<Vec2> normal;
};

struct SurfaceHit {
    double t{0.0};
    Vec2 point;
    Vec2 unit_normal;
    std::size_t curve_index{0};
    std::optional<std::size_t> corner_index;
    bool is_corner{false};
    /// Hit snapped to a corner whose normals cancel. `unit_normal` is then
    /// the plain curve normal and callers should skip the event.
    bool degenerate_corner{false};
};

/// Immutable collection of interface curves inside the disk of radius R,
/// with a precomputed corner registry.
class InterfaceSet {
public:
    InterfaceSet() = default;
    InterfaceSet(double radius, std::vector<InterfaceCurve> curves, double tol_geom = kDefaultTolerance);

    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] double tolerance() const { return tol_; }
    [[nodiscard]] bool empty() const { return curves_.empty(); }
    [[nodiscard]] std::size_t size() const { return curves_.size(); }
    [[nodiscard]] const std::vector<InterfaceCurve>& curves() const { return curves_; }
    [[nodiscard]] const std::vector<Corner>& corners() const { return corners_; }

    /// Nearest crossing with t > t_min + tol along origin + t * direction.
    [[nodiscard]] std::optional<SurfaceHit> nearest_hit(Vec2 origin, Vec2 direction, double t_min) const;

    /// Distance from `p` to the closest curve (infinity for an empty set).
    [[nodiscard]] double distance_to(Vec2 p) const;

    [[nodiscard]] InterfaceSet rotated(double angle) const;

private:
    void register_corners();

    double radius_{0.0};
    double tol_{kDefaultTolerance};
    std::vector<InterfaceCurve> curves_;
    std::vector<Corner> corners_;
};

}  // namespace thzart::geometry
