#include "thzart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thzart/errors.hpp"

namespace thzart::metrics {

double relative_l2(std::span<const double> rec, std::span<const double> truth, std::span<const unsigned char> mask) {
    if (rec.size() != truth.size() || mask.size() != truth.size()) throw DataError("metric inputs differ in size");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (!mask[k]) continue;
        err += (rec[k] - truth[k]) * (rec[k] - truth[k]);
        ref += truth[k] * truth[k];
    }
    if (!(ref > 0.0)) return std::sqrt(err);
    return std::sqrt(err / ref);
}

std::vector<double> absolute_error(std::span<const double> rec, std::span<const double> truth) {
    if (rec.size() != truth.size()) throw DataError("metric inputs differ in size");
    std::vector<double> out(rec.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(rec[k] - truth[k]);
    return out;
}

Mask domain_mask(const GridSpec& grid) {
    Mask mask(grid.pixel_count(), 0);
    for (std::size_t mu = 0; mu < mask.size(); ++mu) mask[mu] = grid.inside_domain(grid.pixel_center(mu)) ? 1 : 0;
    return mask;
}

Mask interface_band(const geometry::InterfaceSet& interfaces, const GridSpec& grid, double width) {
    Mask mask(grid.pixel_count(), 0);
    for (std::size_t mu = 0; mu < mask.size(); ++mu) {
        const Vec2 c = grid.pixel_center(mu);
        mask[mu] = grid.inside_domain(c) && interfaces.distance_to(c) <= width ? 1 : 0;
    }
    return mask;
}

Mask interior_mask(std::span<const unsigned char> footprint, const geometry::InterfaceSet& interfaces,
                   const GridSpec& grid, double margin) {
    if (footprint.size() != grid.pixel_count()) throw DataError("footprint size does not match the grid");
    const auto band = interface_band(interfaces, grid, margin);
    Mask mask(grid.pixel_count(), 0);
    for (std::size_t mu = 0; mu < mask.size(); ++mu) mask[mu] = footprint[mu] && !band[mu] ? 1 : 0;
    return mask;
}

double top_error_share(std::span<const double> error, std::span<const unsigned char> region,
                       std::span<const unsigned char> band, double top_fraction) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < error.size(); ++k)
        if (region[k]) idx.push_back(k);
    if (idx.empty()) return 0.0;
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(top_fraction * idx.size())));
    // ties broken by pixel index for a deterministic selection
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(count), idx.end(), [&](std::size_t a, std::size_t b) {
        return error[a] != error[b] ? error[a] > error[b] : a < b;
    });
    const auto in_band = std::count_if(idx.begin(), idx.begin() + static_cast<long>(count),
                                       [&](std::size_t k) { return band[k] != 0; });
    return static_cast<double>(in_band) / static_cast<double>(count);
}

}  // namespace thzart::metrics
