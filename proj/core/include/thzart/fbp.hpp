#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thzart/forward.hpp"
#include "thzart/model.hpp"

namespace thzart::fbp {

enum class FilterKind { shepp_logan, ram_lak };

struct FilterSpec {
    FilterKind kind{FilterKind::shepp_logan};
    /// Band limit as a fraction of the Nyquist frequency 1 / (2 ds).
    double cutoff{1.0};

    void validate() const;
};

/// Spatial taps h(k ds) for k = -half_width..half_width (index k + half_width),
/// sampled from the band-limited filter impulse response. At full cutoff the
/// Shepp-Logan taps are 2 / (pi^2 ds^2 (1 - 4 k^2)).
std::vector<double> filter_taps(const FilterSpec& filter, std::size_t half_width, double spacing);

/// Discrete convolution q_n = ds sum_k p_k h((n - k) ds).
std::vector<double> filter_projection(std::span<const double> projection, std::span<const double> taps,
                                      double spacing);

/// Filtered backprojection of one channel given per-ray data in sinogram
/// order. Angles cover [0, 2 pi), each weighted pi / p; linear interpolation
/// in the offset. Pixels outside Omega are zero. Bit-identical for any
/// thread count (0 = all cores).
std::vector<double> reconstruct_channel(const ScanGeometry& geometry, std::span<const double> data,
                                        const GridSpec& grid, const FilterSpec& filter, unsigned threads = 0);

/// n - 1 from d, alpha from ln(1/tau). Rays without usable intensity
/// (tau <= 0) contribute zero absorbance; invalid (truncated) records
/// contribute nothing. Throws GeometryError for p < 2.
MaterialField fbp_reconstruct(const forward::Sinogram& sino, const GridSpec& grid, const FilterSpec& filter = {},
                              unsigned threads = 0);

}  // namespace thzart::fbp
