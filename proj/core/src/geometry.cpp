#include "thzart/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "thzart/errors.hpp"

namespace thzart::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

/// Maps an angle into [from, from + 2 pi).
double wrap_from(double angle, double from) {
    double d = std::fmod(angle - from, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return from + d;
}

/// Arc parameter of the direction `v` (relative to the centre), snapped into
/// [from, to] when within `slack` radians of either end. Returns NaN otherwise.
double arc_param(const Arc& arc, Vec2 v, double slack) {
    const double sigma = wrap_from(std::atan2(v.y, v.x), arc.from);
    if (sigma <= arc.to) return sigma;
    if (sigma <= arc.to + slack) return arc.to;
    if (sigma - kTwoPi >= arc.from - slack) return arc.from;
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

InterfaceCurve InterfaceCurve::segment(Vec2 a, Vec2 b) {
    if (!(std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(b.x) && std::isfinite(b.y)))
        throw DomainError("segment endpoints must be finite");
    if (a == b) throw DomainError("segment endpoints coincide");
    return InterfaceCurve(Segment{a, b});
}

InterfaceCurve InterfaceCurve::arc(Vec2 center, double radius, double from, double to) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("arc radius must be positive");
    if (!(from < to)) throw DomainError("arc span must satisfy from < to");
    if (to - from > kTwoPi * (1.0 + 1e-12)) throw DomainError("arc span exceeds a full turn");
    return InterfaceCurve(Arc{center, radius, from, to});
}

InterfaceCurve InterfaceCurve::circle(Vec2 center, double radius) {
    return arc(center, radius, 0.0, kTwoPi);
}

bool InterfaceCurve::is_closed() const {
    if (const auto* a = std::get_if<Arc>(&shape_)) return a->to - a->from >= kTwoPi * (1.0 - 1e-12);
    return false;
}

double InterfaceCurve::param_min() const {
    return std::visit(overloaded{[](const Segment&) { return 0.0; }, [](const Arc& a) { return a.from; }}, shape_);
}

double InterfaceCurve::param_max() const {
    return std::visit(overloaded{[](const Segment&) { return 1.0; }, [](const Arc& a) { return a.to; }}, shape_);
}

Vec2 InterfaceCurve::point_at(double sigma) const {
    return std::visit(overloaded{[&](const Segment& s) { return s.a + (s.b - s.a) * sigma; },
                                 [&](const Arc& a) { return a.center + omega(sigma) * a.radius; }},
                      shape_);
}

Vec2 InterfaceCurve::tangent_at(double sigma) const {
    return std::visit(overloaded{[&](const Segment& s) { return s.b - s.a; },
                                 [&](const Arc& a) { return omega_perp(sigma) * a.radius; }},
                      shape_);
}

double InterfaceCurve::closest_param(Vec2 p) const {
    return std::visit(overloaded{[&](const Segment& s) {
                                     const Vec2 e = s.b - s.a;
                                     return std::clamp(dot(p - s.a, e) / dot(e, e), 0.0, 1.0);
                                 },
                                 [&](const Arc& a) {
                                     const Vec2 v = p - a.center;
                                     if (v == Vec2{}) return a.from;
                                     const double sigma = arc_param(a, v, 0.0);
                                     if (!std::isnan(sigma)) return sigma;
                                     const double d_from = distance(p, point_at(a.from));
                                     const double d_to = distance(p, point_at(a.to));
                                     return d_from <= d_to ? a.from : a.to;
                                 }},
                      shape_);
}

double InterfaceCurve::distance_to(Vec2 p) const { return distance(p, point_at(closest_param(p))); }

double InterfaceCurve::max_radius() const {
    return std::visit(overloaded{[](const Segment& s) { return std::max(norm(s.a), norm(s.b)); },
                                 [this](const Arc& a) {
                                     double best = std::max(norm(point_at(a.from)), norm(point_at(a.to)));
                                     const double c = norm(a.center);
                                     if (c == 0.0) return a.radius;
                                     // farthest point of the full circle lies along the centre direction
                                     const double far = std::atan2(a.center.y, a.center.x);
                                     if (wrap_from(far, a.from) <= a.to) best = std::max(best, c + a.radius);
                                     return best;
                                 }},
                      shape_);
}

InterfaceCurve InterfaceCurve::rotated(double angle) const {
    return std::visit(overloaded{[&](const Segment& s) { return segment(rotate(s.a, angle), rotate(s.b, angle)); },
                                 [&](const Arc& a) {
                                     return arc(rotate(a.center, angle), a.radius, a.from + angle, a.to + angle);
                                 }},
                      shape_);
}

std::vector<InterfaceCurve::Crossing> InterfaceCurve::crossings(Vec2 origin, Vec2 direction, double tol) const {
    std::vector<Crossing> out;
    std::visit(overloaded{[&](const Segment& s) {
                              const Vec2 e = s.b - s.a;
                              const double denom = cross(direction, e);
                              const double len = norm(e);
                              if (std::abs(denom) <= 1e-15 * len) return;  // parallel
                              const Vec2 w = s.a - origin;
                              const double t = cross(w, e) / denom;
                              const double sigma = cross(w, direction) / denom;
                              const double slack = tol / len;
                              if (sigma < -slack || sigma > 1.0 + slack) return;
                              out.push_back({t, std::clamp(sigma, 0.0, 1.0)});
                          },
                          [&](const Arc& a) {
                              const Vec2 m = origin - a.center;
                              const double b = dot(m, direction);
                              const double c = dot(m, m) - a.radius * a.radius;
                              const double disc = b * b - c;
                              if (disc < 0.0) return;
                              const double root = std::sqrt(disc);
                              const double q = b > 0.0 ? -b - root : -b + root;
                              double t1 = q;
                              double t2 = q != 0.0 ? c / q : -q;
                              if (t1 > t2) std::swap(t1, t2);
                              const double slack = tol / a.radius;
                              for (double t : {t1, t2}) {
                                  const double sigma = arc_param(a, m + direction * t, slack);
                                  if (!std::isnan(sigma)) out.push_back({t, sigma});
                              }
                              if (out.size() == 2 && disc == 0.0) out.pop_back();
                          }},
               shape_);
    return out;
}

Vec2 normal_at(const InterfaceCurve& curve, double sigma) {
    if (!(sigma >= curve.param_min() && sigma <= curve.param_max()))
        throw DomainError("curve parameter " + std::to_string(sigma) + " outside its range");
    return normalized(rotate_ccw(curve.tangent_at(sigma)));
}

Vec2 corner_normal(std::span<const Vec2> normals, double tol) {
    if (normals.empty()) throw DomainError("corner_normal needs at least one normal");
    Vec2 sum;
    for (const Vec2& n : normals) sum += n;
    const double len = norm(sum);
    if (len < tol) throw DegenerateCornerError("interface normals cancel at corner");
    return sum / len;
}

InterfaceSet::InterfaceSet(double radius, std::vector<InterfaceCurve> curves, double tol_geom)
    : radius_(radius), tol_(tol_geom), curves_(std::move(curves)) {
    if (!(radius > 0.0)) throw DomainError("reconstruction radius must be positive");
    if (!(tol_geom > 0.0)) throw DomainError("geometric tolerance must be positive");
    for (std::size_t k = 0; k < curves_.size(); ++k) {
        if (!(curves_[k].max_radius() < radius_))
            throw DomainError("interface " + std::to_string(k) + " leaves the reconstruction disk");
    }
    register_corners();
}

void InterfaceSet::register_corners() {
    std::vector<Vec2> candidates;
    for (const auto& c : curves_) {
        if (c.is_closed()) continue;
        candidates.push_back(c.point_at(c.param_min()));
        candidates.push_back(c.point_at(c.param_max()));
    }
    // interior crossings between pairs of curves
    for (std::size_t i = 0; i < curves_.size(); ++i) {
        for (std::size_t j = i + 1; j < curves_.size(); ++j) {
            const auto& ci = curves_[i];
            const auto& cj = curves_[j];
            if (const auto* s = std::get_if<Segment>(&ci.shape())) {
                const Vec2 e = s->b - s->a;
                const double len = norm(e);
                for (const auto& x : cj.crossings(s->a, e / len, tol_))
                    if (x.t >= -tol_ && x.t <= len + tol_) candidates.push_back(cj.point_at(x.sigma));
            } else if (const auto* s2 = std::get_if<Segment>(&cj.shape())) {
                const Vec2 e = s2->b - s2->a;
                const double len = norm(e);
                for (const auto& x : ci.crossings(s2->a, e / len, tol_))
                    if (x.t >= -tol_ && x.t <= len + tol_) candidates.push_back(ci.point_at(x.sigma));
            } else {
                const auto& a = std::get<Arc>(ci.shape());
                const auto& b = std::get<Arc>(cj.shape());
                const Vec2 d = b.center - a.center;
                const double dist = norm(d);
                if (dist == 0.0 || dist > a.radius + b.radius + tol_ ||
                    dist < std::abs(a.radius - b.radius) - tol_)
                    continue;
                const double along = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
                const double h = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
                const Vec2 u = d / dist;
                const Vec2 base = a.center + u * along;
                candidates.push_back(base + rotate_ccw(u) * h);
                candidates.push_back(base - rotate_ccw(u) * h);
            }
        }
    }

    for (const Vec2& p : candidates) {
        const bool known = std::any_of(corners_.begin(), corners_.end(),
                                       [&](const Corner& c) { return distance(c.point, p) <= tol_; });
        if (known) continue;
        Corner corner{p, {}, std::nullopt};
        std::vector<Vec2> normals;
        for (std::size_t k = 0; k < curves_.size(); ++k) {
            if (curves_[k].distance_to(p) <= tol_) {
                corner.curves.push_back(k);
                normals.push_back(normal_at(curves_[k], curves_[k].closest_param(p)));
            }
        }
        if (corner.curves.size() < 2) continue;
        try {
            corner.normal = corner_normal(normals, tol_);
        } catch (const DegenerateCornerError&) {
            corner.normal.reset();
        }
        corners_.push_back(std::move(corner));
    }
}

std::optional<SurfaceHit> InterfaceSet::nearest_hit(Vec2 origin, Vec2 direction, double t_min) const {
    std::optional<SurfaceHit> best;
    const double threshold = t_min + tol_;
    for (std::size_t k = 0; k < curves_.size(); ++k) {
        for (const auto& x : curves_[k].crossings(origin, direction, tol_)) {
            if (!(x.t > threshold) || !std::isfinite(x.t)) continue;
            if (best && !(x.t < best->t)) continue;
            SurfaceHit hit;
            hit.t = x.t;
            hit.point = origin + direction * x.t;
            hit.unit_normal = normal_at(curves_[k], x.sigma);
            hit.curve_index = k;
            best = hit;
        }
    }
    if (!best) return best;
    for (std::size_t c = 0; c < corners_.size(); ++c) {
        if (distance(corners_[c].point, best->point) > tol_) continue;
        best->is_corner = true;
        best->corner_index = c;
        if (corners_[c].normal) {
            best->unit_normal = *corners_[c].normal;
        } else {
            best->degenerate_corner = true;
        }
        break;
    }
    return best;
}

double InterfaceSet::distance_to(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves_) best = std::min(best, c.distance_to(p));
    return best;
}

InterfaceSet InterfaceSet::rotated(double angle) const {
    std::vector<InterfaceCurve> out;
    out.reserve(curves_.size());
    for (const auto& c : curves_) out.push_back(c.rotated(angle));
    return InterfaceSet(radius_, std::move(out), tol_);
}

}  // namespace thzart::geometry
