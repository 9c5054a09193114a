#include "thzart/fbp.hpp"

#include <cmath>
#include <numbers>

#include "thzart/errors.hpp"
#include "thzart/parallel.hpp"

namespace thzart::fbp {

namespace {

constexpr double kPi = std::numbers::pi;

/// int_0^{pi/2} sin(u) cos(b u) du
double sine_cosine_integral(double b) {
    const auto term = [](double c) {
        if (std::abs(c) < 1e-12) return 0.0;
        return (1.0 - std::cos(c * kPi / 2.0)) / c;
    };
    return 0.5 * (term(1.0 + b) + term(1.0 - b));
}

}  // namespace

void FilterSpec::validate() const {
    if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ConfigError("filter cutoff must lie in (0, 1]");
}

std::vector<double> filter_taps(const FilterSpec& filter, std::size_t half_width, double spacing) {
    filter.validate();
    const double band = filter.cutoff / (2.0 * spacing);  // W
    std::vector<double> taps(2 * half_width + 1);
    for (std::size_t idx = 0; idx < taps.size(); ++idx) {
        const double k = static_cast<double>(idx) - static_cast<double>(half_width);
        double h = 0.0;
        if (filter.kind == FilterKind::shepp_logan) {
            // |nu| sinc(nu / 2W) on |nu| <= W, sampled at x = k ds
            h = 8.0 * band * band / (kPi * kPi) * sine_cosine_integral(2.0 * k * filter.cutoff);
        } else {
            // |nu| on |nu| <= W
            const double a = 2.0 * kPi * k * spacing;
            if (k == 0.0) {
                h = band * band;
            } else {
                h = 2.0 * (band * std::sin(a * band) / a + (std::cos(a * band) - 1.0) / (a * a));
            }
        }
        taps[idx] = h;
    }
    return taps;
}

std::vector<double> filter_projection(std::span<const double> projection, std::span<const double> taps,
                                      double spacing) {
    const std::size_t n = projection.size();
    const std::size_t half = taps.size() / 2;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto offset = static_cast<long>(i) - static_cast<long>(k) + static_cast<long>(half);
            if (offset < 0 || offset >= static_cast<long>(taps.size())) continue;
            sum += projection[k] * taps[static_cast<std::size_t>(offset)];
        }
        out[i] = spacing * sum;
    }
    return out;
}

std::vector<double> reconstruct_channel(const ScanGeometry& geometry, std::span<const double> data,
                                        const GridSpec& grid, const FilterSpec& filter, unsigned threads) {
    geometry.validate();
    if (geometry.p < 2) throw GeometryError("filtered backprojection needs at least two angles");
    if (data.size() != geometry.ray_count()) throw DataError("data length does not match the scan geometry");
    grid.validate();

    const std::size_t width = geometry.offsets_per_angle();
    const double ds = geometry.offset_step();
    const auto taps = filter_taps(filter, width - 1, ds);

    std::vector<std::vector<double>> filtered(geometry.p);
    std::vector<Vec2> directions(geometry.p);
    parallel_for(geometry.p, threads, [&](std::size_t a) {
        filtered[a] = filter_projection(data.subspan(a * width, width), taps, ds);
        directions[a] = omega(geometry.angle(a + 1));
    });

    // each pixel accumulates its angles in ascending order, so the result does
    // not depend on the thread count
    std::vector<double> image(grid.pixel_count(), 0.0);
    const double weight = kPi / static_cast<double>(geometry.p);
    const double q = static_cast<double>(geometry.q);
    parallel_for(grid.pixel_count(), threads, [&](std::size_t mu) {
        const Vec2 c = grid.pixel_center(mu);
        if (!grid.inside_domain(c)) return;
        double sum = 0.0;
        for (std::size_t a = 0; a < geometry.p; ++a) {
            const double u = dot(c, directions[a]) / ds + q;  // fractional offset index
            const double base = std::floor(u);
            if (base < 0.0 || base > static_cast<double>(width - 1)) continue;
            const auto k = static_cast<std::size_t>(base);
            const double frac = u - base;
            double value = filtered[a][k] * (1.0 - frac);
            if (k + 1 < width) value += filtered[a][k + 1] * frac;
            sum += weight * value;
        }
        image[mu] = sum;
    });
    return image;
}

MaterialField fbp_reconstruct(const forward::Sinogram& sino, const GridSpec& grid, const FilterSpec& filter,
                              unsigned threads) {
    sino.validate();
    const std::size_t n = sino.size();
    std::vector<double> d(n, 0.0);
    std::vector<double> absorbance(n, 0.0);
    for (std::size_t nu = 0; nu < n; ++nu) {
        if (!sino.records[nu].valid) continue;
        d[nu] = sino.records[nu].d;
        if (const auto g = absorbance_from_tau(sino.records[nu].tau)) absorbance[nu] = *g;
    }
    return MaterialField(grid, reconstruct_channel(sino.geometry, d, grid, filter, threads),
                         reconstruct_channel(sino.geometry, absorbance, grid, filter, threads));
}

}  // namespace thzart::fbp
