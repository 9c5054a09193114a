#pragma once

// Reference computations used by the tests. They share no code with the
// library beyond the Vec2 value type: refraction uses the vector form of
// Snell's law, interfaces are found by bisection on an index function, and
// line integrals clip every pixel box independently.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "thzart/model.hpp"
#include "thzart/vec2.hpp"

namespace oracle {

using thzart::Vec2;

/// Vector Snell refraction of direction `d` at a surface with unit normal
/// `n` (either orientation) going from index n1 into n2. Empty on total
/// internal reflection.
inline std::optional<Vec2> refract(Vec2 d, Vec2 n, double n1, double n2) {
    if (thzart::dot(d, n) > 0.0) n = -n;  // normal against the propagation
    const double eta = n1 / n2;
    const double cos_i = -thzart::dot(d, n);
    const double sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if (sin2_t > 1.0) return std::nullopt;
    const double cos_t = std::sqrt(1.0 - sin2_t);
    return d * eta + n * (eta * cos_i - cos_t);
}

/// Parameter t >= 0 where origin + t d leaves the centred circle of radius r.
inline double exit_circle(Vec2 origin, Vec2 d, double r) {
    const double b = thzart::dot(origin, d);
    const double c = thzart::dot(origin, origin) - r * r;
    return -b + std::sqrt(std::max(0.0, b * b - c));
}

struct DiskExit {
    Vec2 point;      // on the boundary of Omega
    Vec2 direction;  // unit
    bool hits_disk{false};
};

/// Closed-form path of the ray (phi, s) through a centred disk of radius r
/// and index n inside Omega of radius R: refraction at entry and exit.
inline DiskExit disk_closed_form(double phi, double s, double r, double n, double R) {
    const Vec2 w = thzart::omega(phi);
    const Vec2 d0 = thzart::omega_perp(phi);
    const Vec2 start = w * s - d0 * std::sqrt(R * R - s * s);
    if (std::abs(s) >= r) {
        return {start + d0 * exit_circle(start, d0, R), d0, false};
    }
    const Vec2 p1 = w * s - d0 * std::sqrt(r * r - s * s);
    const Vec2 d1 = *refract(d0, p1 / r, 1.0, n);
    const double chord = -2.0 * thzart::dot(p1, d1);
    const Vec2 p2 = p1 + d1 * chord;
    const Vec2 d2 = *refract(d1, p2 / r, n, 1.0);
    return {p2 + d2 * exit_circle(p2, d2, R), d2, true};
}

/// Marches a ray in fixed steps through a piecewise-constant index field.
/// Whenever the index changes across a step the boundary is located by
/// bisection and the direction refracted with the supplied surface normal.
/// Total reflection mirrors the direction.
struct MarchResult {
    Vec2 exit_point;
    Vec2 direction;
    std::size_t crossings{0};
};

inline MarchResult march(Vec2 start, Vec2 d, double R, double step, const std::function<double(Vec2)>& index,
                         const std::function<Vec2(Vec2)>& normal) {
    Vec2 p = start;
    MarchResult out;
    for (std::size_t guard = 0; guard < 100000000; ++guard) {
        Vec2 q = p + d * step;
        if (thzart::norm(q) >= R) {
            out.exit_point = p + d * exit_circle(p, d, R);
            out.direction = d;
            return out;
        }
        const double n1 = index(p);
        const double n2 = index(q);
        if (n1 != n2) {
            double lo = 0.0;
            double hi = step;
            for (int k = 0; k < 80; ++k) {
                const double mid = 0.5 * (lo + hi);
                (index(p + d * mid) == n1 ? lo : hi) = mid;
            }
            const Vec2 hit = p + d * (0.5 * (lo + hi));
            const Vec2 nrm = normal(hit);
            if (const auto t = refract(d, nrm, n1, n2)) {
                d = thzart::normalized(*t);
            } else {
                d = d - nrm * (2.0 * thzart::dot(d, nrm));
            }
            ++out.crossings;
            // restart just past the boundary on the far side
            q = hit + d * (hi - lo + 1e-9);
        }
        p = q;
    }
    out.exit_point = p;
    out.direction = d;
    return out;
}

/// Length of the segment a -> b inside the centred disk of radius R.
inline double clipped_length(Vec2 a, Vec2 b, double R) {
    const Vec2 d = b - a;
    const double len = thzart::norm(d);
    if (len == 0.0) return 0.0;
    const Vec2 u = d / len;
    const double bq = thzart::dot(a, u);
    const double c = thzart::dot(a, a) - R * R;
    const double disc = bq * bq - c;
    if (disc <= 0.0) return 0.0;
    const double t0 = std::max(0.0, -bq - std::sqrt(disc));
    const double t1 = std::min(len, -bq + std::sqrt(disc));
    return std::max(0.0, t1 - t0);
}

/// Straight-line integral of per-pixel values along the line
/// s omega(phi) + t omega_perp(phi), restricted to the disk of radius R.
/// Each pixel box is clipped independently (slab method).
inline double line_integral(const thzart::GridSpec& grid, const std::vector<double>& values, double phi, double s) {
    const Vec2 w = thzart::omega(phi);
    const Vec2 d = thzart::omega_perp(phi);
    const double half = std::sqrt(std::max(0.0, grid.radius * grid.radius - s * s));
    const double t_in = -half;
    const double t_out = half;
    const Vec2 o = w * s;
    double sum = 0.0;
    for (std::size_t row = 0; row < grid.rows; ++row) {
        for (std::size_t col = 0; col < grid.cols; ++col) {
            const double v = values[row * grid.cols + col];
            if (v == 0.0) continue;
            const Vec2 c = grid.pixel_center(row, col);
            const double h = 0.5 * grid.pixel_size;
            double lo = t_in;
            double hi = t_out;
            const auto slab = [&](double origin, double dir, double mn, double mx) {
                if (dir == 0.0) {
                    if (origin < mn || origin > mx) hi = lo - 1.0;
                    return;
                }
                double a = (mn - origin) / dir;
                double b = (mx - origin) / dir;
                if (a > b) std::swap(a, b);
                lo = std::max(lo, a);
                hi = std::min(hi, b);
            };
            slab(o.x, d.x, c.x - h, c.x + h);
            slab(o.y, d.y, c.y - h, c.y + h);
            if (hi > lo) sum += v * (hi - lo);
        }
    }
    return sum;
}

}  // namespace oracle
