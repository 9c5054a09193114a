#include "thzart/raytrace.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <numbers>

#include "thzart/errors.hpp"

namespace thzart::raytrace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double exit_parameter(double radius, double s) { return std::sqrt(std::max(0.0, radius * radius - s * s)); }

/// Parameters alpha in (lo, hi) where a + alpha d crosses the lines
/// origin + k h along one axis, in ascending alpha.
void axis_crossings(double a, double d, double origin, double h, double lo, double hi, std::vector<double>& out) {
    out.clear();
    if (d == 0.0) return;
    const double p_lo = a + d * lo;
    const double p_hi = a + d * hi;
    const double first = std::min(p_lo, p_hi);
    const double last = std::max(p_lo, p_hi);
    const auto k_begin = static_cast<long>(std::floor((first - origin) / h)) + 1;
    const auto k_end = static_cast<long>(std::ceil((last - origin) / h)) - 1;
    for (long k = k_begin; k <= k_end; ++k) {
        const double alpha = (origin + static_cast<double>(k) * h - a) / d;
        if (alpha > lo && alpha < hi) out.push_back(alpha);
    }
    if (d < 0.0) std::reverse(out.begin(), out.end());
}

}  // namespace

double RayPath::transmission_factor() const {
    double c = 1.0;
    for (const auto& e : events) c *= 1.0 - e.optics.reflectance;
    return c;
}

double RayPath::length() const {
    double total = 0.0;
    for (const auto& p : partials) total += p.length();
    return total;
}

double refract_direction(double phi, double gamma1, double gamma2, Vec2 unit_normal, Vec2 direction) {
    const double along_normal = dot(direction, unit_normal);
    if (std::abs(along_normal) < kGrazingThreshold) throw GrazingIncidenceError("ray is tangent to the interface");
    const double along_tangent = dot(direction, rotate_cw(unit_normal));

    double theta = 0.0;
    if ((along_normal < 0.0 && along_tangent <= 0.0) || (along_normal > 0.0 && along_tangent >= 0.0)) {
        theta = gamma1 - gamma2;
    } else {
        theta = gamma2 - gamma1;
    }
    return wrap_angle(phi + theta);
}

double next_offset(double phi_next, Vec2 interface_point) { return dot(omega(phi_next), interface_point); }

RayPath trace(const geometry::InterfaceSet& interfaces, const MaterialField& field, double phi, double s,
              const TraceOptions& options) {
    const double radius = field.grid().radius;
    if (!(std::abs(s) <= radius)) throw DomainError("ray offset exceeds the domain radius");
    if (options.max_refractions < 1) throw DomainError("refraction cap must be at least 1");
    const double probe = options.probe_offset > 0.0 ? options.probe_offset : field.grid().pixel_size;

    RayPath path;
    phi = wrap_angle(phi);
    double t_start = -exit_parameter(radius, s);
    double t_min = t_start;

    while (true) {
        const Vec2 origin = omega(phi) * s;
        const Vec2 dir = omega_perp(phi);
        const double t_exit = exit_parameter(radius, s);
        const auto hit = interfaces.nearest_hit(origin, dir, t_min);

        if (!hit || hit->t >= t_exit) {
            path.partials.push_back({phi, s, t_start, std::max(t_start, t_exit), true});
            break;
        }
        if (hit->degenerate_corner || std::abs(dot(dir, hit->unit_normal)) < kGrazingThreshold) {
            ++path.skipped_events;
            t_min = hit->t;
            continue;
        }
        if (path.events.size() == options.max_refractions) {
            path.truncated = true;
            path.partials.push_back({phi, s, t_start, hit->t, false});
            break;
        }

        const Vec2 normal = hit->unit_normal;
        const auto sides = optics::probe_two_sided(field, hit->point, normal, dir, probe);
        const double gamma1 = std::acos(std::min(1.0, std::abs(dot(dir, normal))));
        const auto ev = optics::snell(sides.incident, sides.far, gamma1);
        const double phi_next = refract_direction(phi, ev.gamma1, ev.gamma2, normal, dir);

        path.partials.push_back({phi, s, t_start, hit->t, false});
        path.events.push_back({hit->point, normal, dir, omega_perp(phi_next), hit->curve_index, hit->is_corner, ev});

        phi = phi_next;
        s = next_offset(phi, hit->point);
        t_start = dot(omega_perp(phi), hit->point);
        t_min = t_start;
    }
    return path;
}

double SparseRow::total_length() const {
    double sum = 0.0;
    for (double l : lengths) sum += l;
    return sum;
}

double SparseRow::squared_norm() const {
    double sum = 0.0;
    for (double l : lengths) sum += l * l;
    return sum;
}

double SparseRow::dot(std::span<const double> values) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < pixels.size(); ++k) sum += lengths[k] * values[pixels[k]];
    return sum;
}

void traverse_segment(Vec2 a, Vec2 b, const GridSpec& grid, std::vector<std::pair<std::uint32_t, double>>& out) {
    const Vec2 d = b - a;
    const double len = norm(d);
    if (!(len > 0.0)) return;

    // clip the parameter range [0, 1] to the grid box
    double lo = 0.0;
    double hi = 1.0;
    const auto clip = [&](double start, double delta, double min, double max) {
        if (delta == 0.0) return start >= min && start <= max;
        double t0 = (min - start) / delta;
        double t1 = (max - start) / delta;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        return lo < hi;
    };
    if (!clip(a.x, d.x, grid.x_min(), grid.x_max()) || !clip(a.y, d.y, grid.y_min(), grid.y_max())) return;

    thread_local std::vector<double> xs;
    thread_local std::vector<double> ys;
    thread_local std::vector<double> alphas;
    axis_crossings(a.x, d.x, grid.x_min(), grid.pixel_size, lo, hi, xs);
    axis_crossings(a.y, d.y, grid.y_min(), grid.pixel_size, lo, hi, ys);
    alphas.clear();
    alphas.reserve(xs.size() + ys.size() + 2);
    alphas.push_back(lo);
    std::merge(xs.begin(), xs.end(), ys.begin(), ys.end(), std::back_inserter(alphas));
    alphas.push_back(hi);

    for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
        const double step = alphas[k + 1] - alphas[k];
        if (!(step > 0.0)) continue;  // pixel corner: zero-length crossing
        const auto mu = grid.pixel_at(a + d * (0.5 * (alphas[k] + alphas[k + 1])));
        if (!mu) continue;
        out.emplace_back(static_cast<std::uint32_t>(*mu), step * len);
    }
}

SparseRow traverse_pixels(const RayPath& path, const GridSpec& grid) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& partial : path.partials) traverse_segment(partial.start(), partial.end(), grid, entries);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });

    SparseRow row;
    row.pixels.reserve(entries.size());
    row.lengths.reserve(entries.size());
    for (const auto& [mu, len] : entries) {
        if (!row.pixels.empty() && row.pixels.back() == mu) {
            row.lengths.back() += len;
        } else {
            row.pixels.push_back(mu);
            row.lengths.push_back(len);
        }
    }
    row.c_abs = path.transmission_factor();
    row.valid = !path.truncated;
    return row;
}

}  // namespace thzart::raytrace
