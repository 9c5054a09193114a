#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "thzart/vec2.hpp"

namespace thzart {

/// Speed of light in vacuum.
inline constexpr double kSpeedOfLightMmPerS = 299'792'458'000.0;
inline constexpr double kSpeedOfLightCmPerS = 29'979'245'800.0;

/// Frequency used when reporting kappa (the instrument sweeps 70-110 GHz).
inline constexpr double kDefaultFrequencyHz = 100e9;

inline constexpr double kMmPerCm = 10.0;

/// kappa = alpha c0 / (4 pi f), with alpha in cm^-1 and f in Hz.
double kappa_from_alpha(double alpha_per_cm, double frequency_hz);

/// Inverse of kappa_from_alpha.
double alpha_from_kappa(double kappa, double frequency_hz);

/// Lambert-Beer absorbance ln(1/tau). Empty for tau <= 0 (the ray carries no
/// usable intensity and must be flagged invalid by the caller).
std::optional<double> absorbance_from_tau(double tau);

/// Square pixel grid centred on the disk Omega = {|x| < R}. Row 0 is the top
/// row (largest y); pixels are stored row-major.
struct GridSpec {
    double radius{0.0};  // R, mm
    std::size_t rows{0};
    std::size_t cols{0};
    double pixel_size{0.0};  // h, mm

    /// Throws DomainError unless h > 0 and the grid covers Omega.
    void validate() const;

    [[nodiscard]] std::size_t pixel_count() const { return rows * cols; }
    [[nodiscard]] double x_min() const { return -0.5 * static_cast<double>(cols) * pixel_size; }
    [[nodiscard]] double x_max() const { return 0.5 * static_cast<double>(cols) * pixel_size; }
    [[nodiscard]] double y_min() const { return -0.5 * static_cast<double>(rows) * pixel_size; }
    [[nodiscard]] double y_max() const { return 0.5 * static_cast<double>(rows) * pixel_size; }

    [[nodiscard]] Vec2 pixel_center(std::size_t row, std::size_t col) const;
    [[nodiscard]] Vec2 pixel_center(std::size_t index) const { return pixel_center(index / cols, index % cols); }

    /// Index of the pixel containing `p`, or empty outside the grid.
    [[nodiscard]] std::optional<std::size_t> pixel_at(Vec2 p) const;

    [[nodiscard]] bool inside_domain(Vec2 p) const { return norm(p) < radius; }

    /// Same disk, pixel side divided by `factor`.
    [[nodiscard]] GridSpec refined(std::size_t factor) const;

    bool operator==(const GridSpec&) const = default;
};

/// Piecewise-constant material on a grid: the two real channels n - 1 and
/// alpha. Alpha is held in mm^-1 so that line integrals over mm lengths are
/// dimensionless; conversion from/to cm^-1 happens at the I/O boundary.
class MaterialField {
public:
    MaterialField() = default;
    explicit MaterialField(GridSpec grid);
    MaterialField(GridSpec grid, std::vector<double> n_minus_1, std::vector<double> alpha_per_mm);

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] std::vector<double>& n_minus_1() { return n_minus_1_; }
    [[nodiscard]] const std::vector<double>& n_minus_1() const { return n_minus_1_; }
    [[nodiscard]] std::vector<double>& alpha() { return alpha_; }
    [[nodiscard]] const std::vector<double>& alpha() const { return alpha_; }

    /// Refractive index n at `p`: 1 outside Omega or outside the grid.
    [[nodiscard]] double index_at(Vec2 p) const;

    /// Zeroes every pixel whose centre lies outside Omega.
    void clear_exterior();

    /// Throws DomainError on negative channels (beyond `tol`) or non-zero
    /// values outside Omega.
    void validate(double tol = 1e-12) const;

private:
    GridSpec grid_;
    std::vector<double> n_minus_1_;
    std::vector<double> alpha_;
};

/// Integrand of the path-difference integral, g_ref = int (n - 1) dx.
const std::vector<double>& path_difference_integrand(const MaterialField& field);

/// Parallel scan: angles phi_i = 2 pi (i - 1) / p for i = 1..p and offsets
/// s_j = (R / q) j for j = -q..q.
struct ScanGeometry {
    std::size_t p{0};
    std::size_t q{0};
    double radius{0.0};

    void validate() const;

    [[nodiscard]] std::size_t ray_count() const { return p * (2 * q + 1); }
    [[nodiscard]] std::size_t offsets_per_angle() const { return 2 * q + 1; }
    [[nodiscard]] double offset_step() const { return radius / static_cast<double>(q); }

    /// i is 1-based, as in the scan enumeration.
    [[nodiscard]] double angle(std::size_t i) const;
    /// j in [-q, q].
    [[nodiscard]] double offset(long j) const;

    /// Ray index nu (0-based) of measurement (i, j), angle-major.
    [[nodiscard]] std::size_t ray_index(std::size_t i, long j) const;

    struct Ray {
        std::size_t i;
        long j;
        double phi;
        double s;
    };
    [[nodiscard]] Ray ray(std::size_t nu) const;

    bool operator==(const ScanGeometry&) const = default;
};

}  // namespace thzart
