#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "thzart/geometry.hpp"
#include "thzart/model.hpp"
#include "thzart/optics.hpp"
#include "thzart/vec2.hpp"

namespace thzart::raytrace {

/// Straight piece of a refracted ray, Gamma(t) = s omega(phi) + t omega_perp(phi)
/// for t in [t_start, t_end]. The offset s is signed so the line always passes
/// through the interface point it starts from.
struct PartialRay {
    double phi{0.0};
    double s{0.0};
    double t_start{0.0};
    double t_end{0.0};
    bool exits{false};  // ends on the boundary of Omega rather than an interface

    [[nodiscard]] Vec2 point(double t) const { return omega(phi) * s + omega_perp(phi) * t; }
    [[nodiscard]] Vec2 start() const { return point(t_start); }
    [[nodiscard]] Vec2 end() const { return point(t_end); }
    [[nodiscard]] Vec2 direction() const { return omega_perp(phi); }
    [[nodiscard]] double length() const { return t_end - t_start; }
};

struct InterfaceEvent {
    Vec2 point;
    Vec2 unit_normal;
    Vec2 incident;   // propagation direction before the event
    Vec2 outgoing;   // propagation direction after the event
    std::size_t curve_index{0};
    bool is_corner{false};
    optics::RefractionEvent optics;
};

struct RayPath {
    std::vector<PartialRay> partials;
    std::vector<InterfaceEvent> events;  // one per crossing, K-hat entries
    bool truncated{false};
    /// Grazing or degenerate-corner hits passed straight through.
    std::size_t skipped_events{0};

    [[nodiscard]] std::size_t interfaces_crossed() const { return events.size(); }
    /// C_abs = prod (1 - rho) over all crossings.
    [[nodiscard]] double transmission_factor() const;
    [[nodiscard]] double length() const;
};

struct TraceOptions {
    /// Crossings after which the path is cut and marked truncated.
    std::size_t max_refractions{64};
    /// Distance of the two-sided index probes from the interface; zero selects
    /// one pixel side of the sampled field.
    double probe_offset{0.0};
};

inline constexpr double kGrazingThreshold = 1e-9;

/// New direction angle after refraction: phi rotated by +-(gamma1 - gamma2),
/// the sign chosen from the signs of <omega_perp, n> and <omega_perp, n_perp>
/// with n_perp = (n_2, -n_1). Result in [0, 2 pi).
/// Throws GrazingIncidenceError when |<omega_perp, n>| < kGrazingThreshold.
double refract_direction(double phi, double gamma1, double gamma2, Vec2 unit_normal, Vec2 direction);

/// Signed offset of the line with angle `phi_next` through `interface_point`:
/// cos(phi) xi_1 + sin(phi) xi_2. Its absolute value is the distance of the
/// new partial ray from the origin.
double next_offset(double phi_next, Vec2 interface_point);

/// Follows one ray from its entry into Omega through every interface crossing.
/// Index samples come from `field`; the domain radius is the field's grid radius.
RayPath trace(const geometry::InterfaceSet& interfaces, const MaterialField& field, double phi, double s,
              const TraceOptions& options = {});

/// One row a^nu of the system matrix plus the Fresnel factor of its path.
struct SparseRow {
    std::vector<std::uint32_t> pixels;  // ascending
    std::vector<double> lengths;        // mm
    double c_abs{1.0};
    bool valid{true};

    [[nodiscard]] std::size_t size() const { return pixels.size(); }
    [[nodiscard]] double total_length() const;
    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] double dot(std::span<const double> values) const;
};

/// Exact per-pixel chord lengths of the path; crossings of the same pixel by
/// different partial rays are summed. Rows of truncated paths are invalid.
SparseRow traverse_pixels(const RayPath& path, const GridSpec& grid);

/// Appends (pixel, length) pairs for the straight segment a -> b.
void traverse_segment(Vec2 a, Vec2 b, const GridSpec& grid, std::vector<std::pair<std::uint32_t, double>>& out);

}  // namespace thzart::raytrace
