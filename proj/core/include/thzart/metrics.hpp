#pragma once

#include <span>
#include <vector>

#include "thzart/geometry.hpp"
#include "thzart/model.hpp"

namespace thzart::metrics {

using Mask = std::vector<unsigned char>;

/// ||rec - truth|| / ||truth|| over the pixels selected by `mask`; the plain
/// ||rec - truth|| when the truth vanishes there (e.g. an air phantom).
/// Throws DataError on size mismatch.
double relative_l2(std::span<const double> rec, std::span<const double> truth, std::span<const unsigned char> mask);

/// |rec - truth| per pixel.
std::vector<double> absolute_error(std::span<const double> rec, std::span<const double> truth);

/// Pixels whose centre lies inside Omega.
Mask domain_mask(const GridSpec& grid);

/// Pixels inside Omega whose centre lies within `width` mm of an interface.
Mask interface_band(const geometry::InterfaceSet& interfaces, const GridSpec& grid, double width);

/// Footprint pixels at least `margin` mm away from every interface.
Mask interior_mask(std::span<const unsigned char> footprint, const geometry::InterfaceSet& interfaces,
                   const GridSpec& grid, double margin);

/// Share of the `top_fraction` largest errors (over `region`) that fall in `band`.
double top_error_share(std::span<const double> error, std::span<const unsigned char> region,
                       std::span<const unsigned char> band, double top_fraction);

}  // namespace thzart::metrics
