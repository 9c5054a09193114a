#include "thzart/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "thzart/errors.hpp"

namespace thzart {

double kappa_from_alpha(double alpha_per_cm, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw DomainError("frequency must be positive");
    return alpha_per_cm * kSpeedOfLightCmPerS / (4.0 * std::numbers::pi * frequency_hz);
}

double alpha_from_kappa(double kappa, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw DomainError("frequency must be positive");
    return kappa * 4.0 * std::numbers::pi * frequency_hz / kSpeedOfLightCmPerS;
}

std::optional<double> absorbance_from_tau(double tau) {
    if (!(tau > 0.0)) return std::nullopt;
    return std::log(1.0 / tau);
}

void GridSpec::validate() const {
    if (!(pixel_size > 0.0)) throw DomainError("pixel size must be positive");
    if (!(radius > 0.0)) throw DomainError("domain radius must be positive");
    if (rows == 0 || cols == 0) throw DomainError("grid must have at least one pixel");
    const double side = 2.0 * radius;
    if (static_cast<double>(rows) * pixel_size < side || static_cast<double>(cols) * pixel_size < side)
        throw DomainError("grid does not cover the reconstruction disk");
}

Vec2 GridSpec::pixel_center(std::size_t row, std::size_t col) const {
    return {x_min() + (static_cast<double>(col) + 0.5) * pixel_size,
            y_max() - (static_cast<double>(row) + 0.5) * pixel_size};
}

std::optional<std::size_t> GridSpec::pixel_at(Vec2 p) const {
    const double cx = std::floor((p.x - x_min()) / pixel_size);
    const double ry = std::floor((y_max() - p.y) / pixel_size);
    if (!(cx >= 0.0 && ry >= 0.0)) return std::nullopt;
    if (cx >= static_cast<double>(cols) || ry >= static_cast<double>(rows)) return std::nullopt;
    return static_cast<std::size_t>(ry) * cols + static_cast<std::size_t>(cx);
}

GridSpec GridSpec::refined(std::size_t factor) const {
    if (factor == 0) throw DomainError("refinement factor must be positive");
    return {radius, rows * factor, cols * factor, pixel_size / static_cast<double>(factor)};
}

MaterialField::MaterialField(GridSpec grid)
    : grid_(grid), n_minus_1_(grid.pixel_count(), 0.0), alpha_(grid.pixel_count(), 0.0) {
    grid_.validate();
}

MaterialField::MaterialField(GridSpec grid, std::vector<double> n_minus_1, std::vector<double> alpha_per_mm)
    : grid_(grid), n_minus_1_(std::move(n_minus_1)), alpha_(std::move(alpha_per_mm)) {
    grid_.validate();
    if (n_minus_1_.size() != grid_.pixel_count() || alpha_.size() != grid_.pixel_count())
        throw DomainError("channel sizes do not match the grid");
}

double MaterialField::index_at(Vec2 p) const {
    if (!grid_.inside_domain(p)) return 1.0;
    const auto mu = grid_.pixel_at(p);
    if (!mu) return 1.0;
    return 1.0 + n_minus_1_[*mu];
}

void MaterialField::clear_exterior() {
    for (std::size_t mu = 0; mu < grid_.pixel_count(); ++mu) {
        if (!grid_.inside_domain(grid_.pixel_center(mu))) {
            n_minus_1_[mu] = 0.0;
            alpha_[mu] = 0.0;
        }
    }
}

void MaterialField::validate(double tol) const {
    for (std::size_t mu = 0; mu < grid_.pixel_count(); ++mu) {
        if (n_minus_1_[mu] < -tol || alpha_[mu] < -tol)
            throw DomainError("negative material value at pixel " + std::to_string(mu));
        if (!grid_.inside_domain(grid_.pixel_center(mu)) && (n_minus_1_[mu] != 0.0 || alpha_[mu] != 0.0))
            throw DomainError("non-zero material outside the domain at pixel " + std::to_string(mu));
    }
}

const std::vector<double>& path_difference_integrand(const MaterialField& field) { return field.n_minus_1(); }

void ScanGeometry::validate() const {
    if (p < 1) throw GeometryError("scan needs at least one angle");
    if (q < 1) throw GeometryError("scan needs q >= 1");
    if (!(radius > 0.0)) throw GeometryError("scan radius must be positive");
}

double ScanGeometry::angle(std::size_t i) const {
    return 2.0 * std::numbers::pi * static_cast<double>(i - 1) / static_cast<double>(p);
}

double ScanGeometry::offset(long j) const {
    return radius / static_cast<double>(q) * static_cast<double>(j);
}

std::size_t ScanGeometry::ray_index(std::size_t i, long j) const {
    return (i - 1) * offsets_per_angle() + static_cast<std::size_t>(j + static_cast<long>(q));
}

ScanGeometry::Ray ScanGeometry::ray(std::size_t nu) const {
    const std::size_t i = nu / offsets_per_angle() + 1;
    const long j = static_cast<long>(nu % offsets_per_angle()) - static_cast<long>(q);
    return {i, j, angle(i), offset(j)};
}

}  // namespace thzart
