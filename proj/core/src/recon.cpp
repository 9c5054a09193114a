#include "thzart/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "thzart/errors.hpp"
#include "thzart/parallel.hpp"

namespace thzart::recon {

namespace {

double residual_norm(const SystemMatrix& matrix, std::span<const double> values, std::span<const double> data,
                     std::span<const unsigned char> usable) {
    double sum = 0.0;
    for (std::size_t nu = 0; nu < matrix.size(); ++nu) {
        if (!usable[nu]) continue;
        const double r = data[nu] - matrix.rows[nu].dot(values);
        sum += r * r;
    }
    return std::sqrt(sum);
}

/// Shared outer loop. With `refracted` false the straight-ray matrix is built
/// once and intensities are not corrected.
ReconResult run_art(const forward::Sinogram& sino, const geometry::InterfaceSet& interfaces, const GridSpec& grid,
                    const ReconConfig& config, bool refracted) {
    config.validate();
    sino.validate();
    grid.validate();
    if (std::abs(sino.geometry.radius - grid.radius) > 1e-9 * grid.radius)
        throw ConfigError("scan radius and grid radius differ");

    const auto& geometry = sino.geometry;
    const std::size_t n_rays = geometry.ray_count();
    const auto filtered = filter_rays(sino, config.eps_miss);

    std::vector<double> g_ref(n_rays, 0.0);
    for (std::size_t nu = 0; nu < n_rays; ++nu) g_ref[nu] = sino.records[nu].d;

    const bool reset = refracted && config.exterior_reset && !interfaces.empty();
    std::vector<unsigned char> footprint;
    if (reset) footprint = object_footprint(interfaces, grid);

    ReconResult result{MaterialField(grid), {}};
    auto& field = result.field;
    const auto order = row_order(n_rays, config.order, config.seed);
    const geometry::InterfaceSet straight(geometry.radius, {});

    SystemMatrix matrix;
    std::vector<double> g_abs(n_rays, 0.0);
    std::vector<unsigned char> usable(n_rays, 0);

    for (std::size_t sweep = 0; sweep < config.sweeps(); ++sweep) {
        if (refracted || sweep == 0) {
            matrix = build_system_matrix(refracted ? interfaces : straight, field, geometry, config.matrix);
            std::size_t count = 0;
            for (std::size_t nu = 0; nu < n_rays; ++nu) {
                const auto& row = matrix.rows[nu];
                const double c_abs = refracted && config.fresnel_correction ? row.c_abs : 1.0;
                usable[nu] = filtered[nu] && row.valid && c_abs > 0.0 ? 1 : 0;
                g_abs[nu] = usable[nu] ? std::log(c_abs / sino.records[nu].tau) : 0.0;
                count += usable[nu];
            }
            if (count == 0) throw EmptyDataError("no usable rays after filtering");
        }

        kaczmarz_dual_sweep(field.n_minus_1(), field.alpha(), matrix, g_ref, g_abs, usable,
                            config.lambda_ref[sweep], config.lambda_abs[sweep], config.iterations[sweep], order);

        SweepLog entry;
        entry.sweep = sweep + 1;
        entry.iterations = config.iterations[sweep];
        entry.usable_rays = static_cast<std::size_t>(std::count(usable.begin(), usable.end(), 1));
        entry.skipped_events = matrix.skipped_events;
        entry.truncated_rows = matrix.truncated_rows;
        entry.residual_ref = residual_norm(matrix, field.n_minus_1(), g_ref, usable);
        entry.residual_abs = residual_norm(matrix, field.alpha(), g_abs, usable);
        result.log.push_back(entry);

        // zero after every sweep, hence also before the next rebuild and
        // Kaczmarz application (the first starts from F = 0)
        if (reset) apply_exterior_reset(field, footprint);
        if (config.on_sweep) config.on_sweep(entry, field);
    }
    field.clear_exterior();
    return result;
}

}  // namespace

SystemMatrix build_system_matrix(const geometry::InterfaceSet& interfaces, const MaterialField& estimate,
                                 const ScanGeometry& geometry, const MatrixOptions& options) {
    geometry.validate();
    SystemMatrix matrix;
    const std::size_t n_rays = geometry.ray_count();
    matrix.rows.resize(n_rays);
    matrix.squared_norms.resize(n_rays);
    std::vector<std::size_t> skipped(n_rays, 0);
    parallel_for(n_rays, options.threads, [&](std::size_t nu) {
        const auto ray = geometry.ray(nu);
        const auto path = raytrace::trace(interfaces, estimate, ray.phi, ray.s, options.trace);
        auto row = raytrace::traverse_pixels(path, estimate.grid());
        const double norm2 = row.squared_norm();
        if (!(norm2 > 0.0)) row.valid = false;
        matrix.squared_norms[nu] = norm2;
        matrix.rows[nu] = std::move(row);
        skipped[nu] = path.skipped_events;
    });
    for (std::size_t nu = 0; nu < n_rays; ++nu) {
        matrix.skipped_events += skipped[nu];
        if (matrix.rows[nu].valid == false && matrix.squared_norms[nu] > 0.0) ++matrix.truncated_rows;
    }
    return matrix;
}

std::vector<std::size_t> row_order(std::size_t count, RowOrder order, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order == RowOrder::random) {
        // Fisher-Yates with explicit index draws keeps the permutation
        // independent of the standard library's shuffle implementation
        std::mt19937_64 rng(seed);
        for (std::size_t k = count; k > 1; --k) std::swap(idx[k - 1], idx[rng() % k]);
    }
    return idx;
}

void kaczmarz_sweep(std::span<double> values, const SystemMatrix& matrix, std::span<const double> data,
                    std::span<const unsigned char> usable, double lambda, std::size_t iterations,
                    std::span<const std::size_t> order) {
    if (lambda == 0.0) return;
    for (std::size_t it = 0; it < iterations; ++it) {
        for (const std::size_t nu : order) {
            if (!usable[nu]) continue;
            const auto& row = matrix.rows[nu];
            const double step = lambda * (data[nu] - row.dot(values)) / matrix.squared_norms[nu];
            for (std::size_t k = 0; k < row.pixels.size(); ++k) values[row.pixels[k]] += step * row.lengths[k];
        }
    }
}

void kaczmarz_dual_sweep(std::span<double> refractive, std::span<double> absorption, const SystemMatrix& matrix,
                         std::span<const double> g_ref, std::span<const double> g_abs,
                         std::span<const unsigned char> usable, double lambda_ref, double lambda_abs,
                         std::size_t iterations, std::span<const std::size_t> order) {
    const bool do_ref = lambda_ref != 0.0;
    const bool do_abs = lambda_abs != 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        for (const std::size_t nu : order) {
            if (!usable[nu]) continue;
            const auto& row = matrix.rows[nu];
            const double inv_norm = 1.0 / matrix.squared_norms[nu];
            if (do_ref) {
                const double step = lambda_ref * (g_ref[nu] - row.dot(refractive)) * inv_norm;
                for (std::size_t k = 0; k < row.pixels.size(); ++k) refractive[row.pixels[k]] += step * row.lengths[k];
            }
            if (do_abs) {
                const double step = lambda_abs * (g_abs[nu] - row.dot(absorption)) * inv_norm;
                for (std::size_t k = 0; k < row.pixels.size(); ++k) absorption[row.pixels[k]] += step * row.lengths[k];
            }
        }
    }
}

std::vector<unsigned char> filter_rays(const forward::Sinogram& sino, double eps_miss) {
    if (!(eps_miss >= 0.0 && eps_miss < 1.0)) throw ConfigError("eps_miss must lie in [0, 1)");
    std::vector<unsigned char> mask(sino.records.size(), 0);
    for (std::size_t nu = 0; nu < sino.records.size(); ++nu) {
        const auto& r = sino.records[nu];
        mask[nu] = r.valid && r.tau > eps_miss ? 1 : 0;
    }
    return mask;
}

void ReconConfig::validate() const {
    const std::size_t psi = iterations.size();
    if (psi == 0) throw ConfigError("at least one outer sweep is required");
    if (lambda_ref.size() != psi || lambda_abs.size() != psi)
        throw ConfigError("relaxation vectors must have one entry per sweep (" + std::to_string(psi) + ")");
    for (std::size_t i = 0; i < psi; ++i) {
        if (!(lambda_ref[i] >= 0.0 && lambda_ref[i] < 2.0) || !(lambda_abs[i] >= 0.0 && lambda_abs[i] < 2.0))
            throw ConfigError("relaxation parameters must lie in [0, 2)");
    }
    if (!(eps_miss >= 0.0 && eps_miss < 1.0)) throw ConfigError("eps_miss must lie in [0, 1)");
}

ReconConfig ReconConfig::synthetic_schedule() {
    ReconConfig cfg;
    cfg.iterations = {3, 3, 5, 7, 5};
    cfg.lambda_ref = {0.01, 0.01, 0.006, 0.002, 0.0};
    cfg.lambda_abs = {0.002, 0.004, 0.004, 0.004, 0.003};
    cfg.exterior_reset = true;
    return cfg;
}

ReconConfig ReconConfig::conventional_baseline() {
    ReconConfig cfg;
    cfg.iterations = {15};
    cfg.lambda_ref = {0.005};
    cfg.lambda_abs = {0.005};
    return cfg;
}

ReconResult conventional_art(const forward::Sinogram& sino, const GridSpec& grid, const ReconConfig& config) {
    return run_art(sino, geometry::InterfaceSet{}, grid, config, false);
}

ReconResult modified_art(const forward::Sinogram& sino, const geometry::InterfaceSet& interfaces,
                         const GridSpec& grid, const ReconConfig& config) {
    return run_art(sino, interfaces, grid, config, true);
}

std::vector<unsigned char> object_footprint(const geometry::InterfaceSet& interfaces, const GridSpec& grid) {
    std::vector<unsigned char> mask(grid.pixel_count(), 0);
    if (interfaces.empty()) return mask;
    const Vec2 axes[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    for (std::size_t mu = 0; mu < grid.pixel_count(); ++mu) {
        const Vec2 c = grid.pixel_center(mu);
        if (!grid.inside_domain(c)) continue;
        const bool enclosed = std::all_of(std::begin(axes), std::end(axes), [&](const Vec2& dir) {
            return interfaces.nearest_hit(c, dir, -interfaces.tolerance()).has_value();
        });
        mask[mu] = enclosed ? 1 : 0;
    }
    return mask;
}

void apply_exterior_reset(MaterialField& field, std::span<const unsigned char> footprint) {
    for (std::size_t mu = 0; mu < footprint.size(); ++mu) {
        if (footprint[mu]) continue;
        field.n_minus_1()[mu] = 0.0;
        field.alpha()[mu] = 0.0;
    }
}

std::vector<double> kappa_channel(const MaterialField& field, double frequency_hz) {
    std::vector<double> out(field.alpha().size());
    for (std::size_t mu = 0; mu < out.size(); ++mu)
        out[mu] = kappa_from_alpha(field.alpha()[mu] * kMmPerCm, frequency_hz);
    return out;
}

}  // namespace thzart::recon
