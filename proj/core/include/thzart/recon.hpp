#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "thzart/forward.hpp"
#include "thzart/geometry.hpp"
#include "thzart/model.hpp"
#include "thzart/raytrace.hpp"

namespace thzart::recon {

/// Rows a^nu of the (possibly refracted) projection matrix in ray order.
struct SystemMatrix {
    std::vector<raytrace::SparseRow> rows;
    std::vector<double> squared_norms;
    std::size_t skipped_events{0};
    std::size_t truncated_rows{0};

    [[nodiscard]] std::size_t size() const { return rows.size(); }
};

struct MatrixOptions {
    raytrace::TraceOptions trace;
    unsigned threads{0};
};

/// Traces every ray of `geometry` through `estimate` (index samples come from
/// its n - 1 channel) and assembles one row per ray. Rows of zero norm or of
/// truncated paths are marked invalid.
SystemMatrix build_system_matrix(const geometry::InterfaceSet& interfaces, const MaterialField& estimate,
                                 const ScanGeometry& geometry, const MatrixOptions& options = {});

enum class RowOrder { natural, random };

/// Visiting order of the rows: 0..N-1, or a seeded permutation.
std::vector<std::size_t> row_order(std::size_t count, RowOrder order, std::uint64_t seed);

/// `iterations` Kaczmarz passes over the usable rows of `matrix`:
/// F <- F + lambda (g - <a, F>) / |a|^2 a. lambda = 0 leaves F unchanged.
void kaczmarz_sweep(std::span<double> values, const SystemMatrix& matrix, std::span<const double> data,
                    std::span<const unsigned char> usable, double lambda, std::size_t iterations,
                    std::span<const std::size_t> order);

/// Both channels updated in one pass over the rows (shared a^nu).
void kaczmarz_dual_sweep(std::span<double> refractive, std::span<double> absorption, const SystemMatrix& matrix,
                         std::span<const double> g_ref, std::span<const double> g_abs,
                         std::span<const unsigned char> usable, double lambda_ref, double lambda_abs,
                         std::size_t iterations, std::span<const std::size_t> order);

/// 1 for rays that are valid and have tau > eps_miss.
std::vector<unsigned char> filter_rays(const forward::Sinogram& sino, double eps_miss);

struct SweepLog {
    std::size_t sweep{0};
    std::size_t iterations{0};
    std::size_t usable_rays{0};
    std::size_t skipped_events{0};
    std::size_t truncated_rows{0};
    double residual_ref{0.0};  // ||g_ref - A F_ref|| after the sweep
    double residual_abs{0.0};
};

struct ReconConfig {
    /// r_stop per outer sweep; the vector length is the sweep count Psi.
    std::vector<std::size_t> iterations{1};
    std::vector<double> lambda_ref{0.005};
    std::vector<double> lambda_abs{0.005};
    double eps_miss{0.0};
    bool exterior_reset{false};
    /// Correct intensities for Fresnel losses (g_abs = ln(C_abs / tau)).
    bool fresnel_correction{true};
    RowOrder order{RowOrder::natural};
    std::uint64_t seed{0};
    MatrixOptions matrix;
    /// Optional observer called with the estimate after each outer sweep.
    std::function<void(const SweepLog&, const MaterialField&)> on_sweep;

    [[nodiscard]] std::size_t sweeps() const { return iterations.size(); }
    /// Throws ConfigError on inconsistent lengths or out-of-range values.
    void validate() const;

    /// Psi = 5, psi = (3, 3, 5, 7, 5), the synthetic-data relaxation schedule.
    static ReconConfig synthetic_schedule();
    /// 15 sweeps of straight-ray ART with lambda = 0.005.
    static ReconConfig conventional_baseline();
};

struct ReconResult {
    MaterialField field;  // (n - 1, alpha in mm^-1)
    std::vector<SweepLog> log;
};

/// Straight-ray ART on both channels with g_ref = d and g_abs = ln(1/tau).
/// Throws EmptyDataError when no ray survives filtering.
ReconResult conventional_art(const forward::Sinogram& sino, const GridSpec& grid, const ReconConfig& config);

/// ART with refracted ray paths and Fresnel-corrected absorption data rebuilt
/// from the current index estimate before every outer sweep.
ReconResult modified_art(const forward::Sinogram& sino, const geometry::InterfaceSet& interfaces,
                         const GridSpec& grid, const ReconConfig& config);

/// Pixels enclosed by the interfaces: rays cast from the pixel centre along
/// all four axis directions meet some interface. Empty set gives no pixels.
std::vector<unsigned char> object_footprint(const geometry::InterfaceSet& interfaces, const GridSpec& grid);

/// Zeroes both channels outside `footprint`.
void apply_exterior_reset(MaterialField& field, std::span<const unsigned char> footprint);

/// Imaginary part kappa of the complex index for display, from alpha (mm^-1).
std::vector<double> kappa_channel(const MaterialField& field, double frequency_hz = kDefaultFrequencyHz);

}  // namespace thzart::recon
