#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "thzart/geometry.hpp"
#include "thzart/model.hpp"

namespace thzart::phantom {

struct Disk {
    Vec2 center;
    double radius{0.0};
};

/// Axis-aligned rectangle.
struct Rectangle {
    Vec2 center;
    double width{0.0};
    double height{0.0};
};

/// Convex polygon; vertices in either winding.
struct Polygon {
    std::vector<Vec2> vertices;
};

/// Homogeneous region. Later regions in a list overwrite earlier ones.
struct PhantomRegion {
    std::variant<Disk, Rectangle, Polygon> shape;
    double n{1.0};
    double alpha_per_cm{0.0};

    /// Closed-set membership test.
    [[nodiscard]] bool contains(Vec2 p) const;
    /// Throws DomainError when the region is non-physical or leaves the disk.
    void validate(double domain_radius) const;
};

/// Ground truth at pixel centres: (n - 1, alpha) of the topmost region
/// containing the centre, air elsewhere and outside Omega.
MaterialField rasterize(std::span<const PhantomRegion> regions, const GridSpec& grid);

/// Boundary curves of all regions: a full circle per disk, counter-clockwise
/// edges per rectangle or polygon. Exactly coincident edges are emitted once.
geometry::InterfaceSet interfaces_of(std::span<const PhantomRegion> regions, double domain_radius,
                                     double tol_geom = geometry::kDefaultTolerance);

/// A named test object: regions plus, optionally, a hand-built interface
/// list (for objects whose shared edges need splitting at junctions).
struct Phantom {
    std::string name;
    double domain_radius{70.0};
    std::vector<PhantomRegion> regions;
    std::optional<std::vector<geometry::InterfaceCurve>> interfaces;
    double tol_geom{geometry::kDefaultTolerance};

    [[nodiscard]] geometry::InterfaceSet interface_set() const;
    [[nodiscard]] MaterialField rasterize(const GridSpec& grid) const;
    /// Pixels whose centre lies inside at least one region.
    [[nodiscard]] std::vector<unsigned char> footprint(const GridSpec& grid) const;
    void validate() const;
};

/// Disk of radius 50 mm (n = 1.4, alpha = 0.05 /cm) holding an off-centre
/// 25 x 20 mm rectangle (n = 1.7, alpha = 0.25 /cm); Omega radius 70 mm.
Phantom circle_rectangle();

/// Single homogeneous disk centred at the origin.
Phantom centered_disk(double radius, double n, double alpha_per_cm, double domain_radius = 70.0);

/// Indices of the five glued plastic blocks. The defaults are placeholders:
/// only the ordering (polyamide highest, polyethylene lowest) is known.
struct GluedBlockMaterials {
    double top_left{1.53};
    double top_middle{1.70};  // polyamide
    double top_right{1.55};
    double bottom_left{1.58};
    double bottom_right{1.51};  // polyethylene
    double alpha_per_cm{0.1};
};

/// 80 x 40 mm block split into three blocks on top and two below.
Phantom glued_blocks(const GluedBlockMaterials& materials = {});

/// Preset by name: "circle-rect", "disk" (r = 50, n = 1.4), "absorbing-disk"
/// (r = 50, n = 1, alpha only), "glued-blocks", "air". Throws ConfigError.
Phantom preset(const std::string& name);

}  // namespace thzart::phantom
