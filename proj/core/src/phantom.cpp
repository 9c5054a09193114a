#include "thzart/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "thzart/errors.hpp"

namespace thzart::phantom {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) a += cross(v[k], v[(k + 1) % v.size()]);
    return 0.5 * a;
}

std::vector<Vec2> corners_ccw(const PhantomRegion& region) {
    return std::visit(overloaded{[](const Disk&) { return std::vector<Vec2>{}; },
                                 [](const Rectangle& r) {
                                     const double hx = 0.5 * r.width;
                                     const double hy = 0.5 * r.height;
                                     const Vec2 c = r.center;
                                     return std::vector<Vec2>{c + Vec2{-hx, -hy}, c + Vec2{hx, -hy}, c + Vec2{hx, hy},
                                                              c + Vec2{-hx, hy}};
                                 },
                                 [](const Polygon& p) {
                                     auto v = p.vertices;
                                     if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
                                     return v;
                                 }},
                      region.shape);
}

}  // namespace

bool PhantomRegion::contains(Vec2 p) const {
    return std::visit(overloaded{[&](const Disk& d) { return distance(p, d.center) <= d.radius; },
                                 [&](const Rectangle& r) {
                                     return std::abs(p.x - r.center.x) <= 0.5 * r.width &&
                                            std::abs(p.y - r.center.y) <= 0.5 * r.height;
                                 },
                                 [&](const Polygon&) {
                                     const auto v = corners_ccw(*this);
                                     for (std::size_t k = 0; k < v.size(); ++k) {
                                         if (cross(v[(k + 1) % v.size()] - v[k], p - v[k]) < 0.0) return false;
                                     }
                                     return true;
                                 }},
                      shape);
}

void PhantomRegion::validate(double domain_radius) const {
    if (!(n >= 1.0)) throw DomainError("region index must be >= 1");
    if (!(alpha_per_cm >= 0.0)) throw DomainError("region absorption must be >= 0");
    std::visit(overloaded{[&](const Disk& d) {
                              if (!(d.radius > 0.0)) throw DomainError("disk radius must be positive");
                              if (!(norm(d.center) + d.radius < domain_radius))
                                  throw DomainError("disk leaves the reconstruction domain");
                          },
                          [&](const Rectangle& r) {
                              if (!(r.width > 0.0 && r.height > 0.0))
                                  throw DomainError("rectangle sides must be positive");
                          },
                          [&](const Polygon& p) {
                              if (p.vertices.size() < 3) throw DomainError("polygon needs three vertices");
                              const auto v = corners_ccw(*this);
                              if (!(signed_area(v) > 0.0)) throw DomainError("polygon has no area");
                              for (std::size_t k = 0; k < v.size(); ++k) {
                                  const Vec2 e1 = v[(k + 1) % v.size()] - v[k];
                                  const Vec2 e2 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
                                  if (cross(e1, e2) < 0.0) throw DomainError("polygon is not convex");
                              }
                          }},
               shape);
    for (const Vec2& c : corners_ccw(*this))
        if (!(norm(c) < domain_radius)) throw DomainError("region leaves the reconstruction domain");
}

MaterialField rasterize(std::span<const PhantomRegion> regions, const GridSpec& grid) {
    MaterialField field(grid);
    for (std::size_t mu = 0; mu < grid.pixel_count(); ++mu) {
        const Vec2 c = grid.pixel_center(mu);
        if (!grid.inside_domain(c)) continue;
        for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
            if (it->contains(c)) {
                field.n_minus_1()[mu] = it->n - 1.0;
                field.alpha()[mu] = it->alpha_per_cm / kMmPerCm;
                break;
            }
        }
    }
    return field;
}

geometry::InterfaceSet interfaces_of(std::span<const PhantomRegion> regions, double domain_radius, double tol_geom) {
    using geometry::InterfaceCurve;
    std::vector<InterfaceCurve> curves;
    std::vector<std::pair<Vec2, Vec2>> edges;
    const auto seen = [&](Vec2 a, Vec2 b) {
        return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
            return (distance(e.first, a) <= tol_geom && distance(e.second, b) <= tol_geom) ||
                   (distance(e.first, b) <= tol_geom && distance(e.second, a) <= tol_geom);
        });
    };
    for (const auto& region : regions) {
        if (const auto* d = std::get_if<Disk>(&region.shape)) {
            curves.push_back(InterfaceCurve::circle(d->center, d->radius));
            continue;
        }
        const auto v = corners_ccw(region);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const Vec2 a = v[k];
            const Vec2 b = v[(k + 1) % v.size()];
            if (seen(a, b)) continue;
            edges.emplace_back(a, b);
            curves.push_back(InterfaceCurve::segment(a, b));
        }
    }
    return geometry::InterfaceSet(domain_radius, std::move(curves), tol_geom);
}

geometry::InterfaceSet Phantom::interface_set() const {
    if (interfaces) return geometry::InterfaceSet(domain_radius, *interfaces, tol_geom);
    return interfaces_of(regions, domain_radius, tol_geom);
}

MaterialField Phantom::rasterize(const GridSpec& grid) const { return phantom::rasterize(regions, grid); }

std::vector<unsigned char> Phantom::footprint(const GridSpec& grid) const {
    std::vector<unsigned char> mask(grid.pixel_count(), 0);
    for (std::size_t mu = 0; mu < grid.pixel_count(); ++mu) {
        const Vec2 c = grid.pixel_center(mu);
        if (!grid.inside_domain(c)) continue;
        mask[mu] = std::any_of(regions.begin(), regions.end(), [&](const auto& r) { return r.contains(c); }) ? 1 : 0;
    }
    return mask;
}

void Phantom::validate() const {
    if (!(domain_radius > 0.0)) throw DomainError("domain radius must be positive");
    for (const auto& r : regions) r.validate(domain_radius);
}

Phantom circle_rectangle() {
    Phantom p;
    p.name = "circle-rect";
    p.domain_radius = 70.0;
    p.regions = {
        PhantomRegion{Disk{{0.0, 0.0}, 50.0}, 1.4, 0.05},
        PhantomRegion{Rectangle{{10.0, 7.5}, 25.0, 20.0}, 1.7, 0.25},
    };
    return p;
}

Phantom centered_disk(double radius, double n, double alpha_per_cm, double domain_radius) {
    Phantom p;
    p.name = "disk";
    p.domain_radius = domain_radius;
    p.regions = {PhantomRegion{Disk{{0.0, 0.0}, radius}, n, alpha_per_cm}};
    p.validate();
    return p;
}

Phantom glued_blocks(const GluedBlockMaterials& m) {
    using geometry::InterfaceCurve;
    Phantom p;
    p.name = "glued-blocks";
    p.domain_radius = 70.0;
    const double a = m.alpha_per_cm;
    p.regions = {
        PhantomRegion{Rectangle{{-27.5, 10.0}, 25.0, 20.0}, m.top_left, a},
        PhantomRegion{Rectangle{{0.0, 10.0}, 30.0, 20.0}, m.top_middle, a},
        PhantomRegion{Rectangle{{27.5, 10.0}, 25.0, 20.0}, m.top_right, a},
        PhantomRegion{Rectangle{{-20.0, -10.0}, 40.0, 20.0}, m.bottom_left, a},
        PhantomRegion{Rectangle{{20.0, -10.0}, 40.0, 20.0}, m.bottom_right, a},
    };
    // outer boundary counter-clockwise, split at every junction
    const std::vector<Vec2> outer = {{-40, -20}, {0, -20}, {40, -20}, {40, 0},   {40, 20},
                                     {15, 20},   {-15, 20}, {-40, 20}, {-40, 0}};
    std::vector<InterfaceCurve> curves;
    for (std::size_t k = 0; k < outer.size(); ++k)
        curves.push_back(InterfaceCurve::segment(outer[k], outer[(k + 1) % outer.size()]));
    const std::vector<std::pair<Vec2, Vec2>> inner = {
        {{-40, 0}, {-15, 0}}, {{-15, 0}, {0, 0}},  {{0, 0}, {15, 0}},     {{15, 0}, {40, 0}},
        {{-15, 0}, {-15, 20}}, {{15, 0}, {15, 20}}, {{0, -20}, {0, 0}},
    };
    for (const auto& [from, to] : inner) curves.push_back(InterfaceCurve::segment(from, to));
    p.interfaces = std::move(curves);
    p.validate();
    return p;
}

Phantom preset(const std::string& name) {
    if (name == "circle-rect") return circle_rectangle();
    if (name == "disk") return centered_disk(50.0, 1.4, 0.05);
    if (name == "glued-blocks") return glued_blocks();
    if (name == "absorbing-disk") {
        auto p = centered_disk(50.0, 1.0, 0.05);
        p.name = name;
        return p;
    }
    if (name == "air") {
        Phantom p;
        p.name = name;
        return p;
    }
    throw ConfigError("unknown phantom preset '" + name + "'");
}

}  // namespace thzart::phantom
