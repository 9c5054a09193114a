#include "thzart/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "thzart/errors.hpp"
#include "thzart/parallel.hpp"

namespace thzart::forward {

namespace {

/// Uniform sample in [-1, 1) from the top 53 bits; independent of the
/// standard library's distribution implementation.
double symmetric_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

double l2(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

bool detector_missed(const raytrace::RayPath& path, double phi, double s, double half_width) {
    if (half_width <= 0.0 || path.partials.empty()) return false;
    const auto& last = path.partials.back();
    if (dot(last.direction(), omega_perp(phi)) <= 0.0) return true;
    return std::abs(dot(last.end(), omega(phi)) - s) > half_width;
}

}  // namespace

void Sinogram::validate() const {
    geometry.validate();
    if (records.size() != geometry.ray_count())
        throw DataError("sinogram holds " + std::to_string(records.size()) + " records, geometry expects " +
                        std::to_string(geometry.ray_count()));
    for (std::size_t nu = 0; nu < records.size(); ++nu) {
        const auto expected = geometry.ray(nu);
        const auto& r = records[nu];
        if (r.i != expected.i || r.j != expected.j)
            throw DataError("sinogram record " + std::to_string(nu) + " is out of (i, j) order");
        if (!std::isfinite(r.d) || !std::isfinite(r.tau)) throw DataError("non-finite measurement in record " + std::to_string(nu));
    }
}

Sinogram simulate(const MaterialField& field, const geometry::InterfaceSet& interfaces, const ScanGeometry& geometry,
                  const SimulationOptions& options) {
    geometry.validate();
    Sinogram sino{geometry, std::vector<Measurement>(geometry.ray_count())};
    const auto& grid = field.grid();
    parallel_for(geometry.ray_count(), options.threads, [&](std::size_t nu) {
        const auto ray = geometry.ray(nu);
        const auto path = raytrace::trace(interfaces, field, ray.phi, ray.s, options.trace);
        const auto row = raytrace::traverse_pixels(path, grid);
        Measurement m{ray.i, ray.j, ray.phi, ray.s, 1.0, 0.0, row.valid};
        m.d = row.dot(field.n_minus_1());
        m.tau = std::exp(-row.dot(field.alpha())) * row.c_abs;
        if (detector_missed(path, ray.phi, ray.s, options.detector_half_width)) m.tau = 0.0;
        sino.records[nu] = m;
    });
    return sino;
}

Sinogram add_noise(const Sinogram& clean, double level, std::uint64_t seed) {
    if (!(level >= 0.0)) throw DomainError("noise level must be non-negative");
    Sinogram noisy = clean;
    if (level == 0.0) return noisy;

    std::vector<std::size_t> used;
    for (std::size_t nu = 0; nu < clean.records.size(); ++nu)
        if (clean.records[nu].valid) used.push_back(nu);

    std::mt19937_64 rng(seed);
    std::vector<double> u_tau(used.size());
    std::vector<double> u_d(used.size());
    std::vector<double> tau(used.size());
    std::vector<double> d(used.size());
    for (std::size_t k = 0; k < used.size(); ++k) {
        u_tau[k] = symmetric_unit(rng);
        u_d[k] = symmetric_unit(rng);
        tau[k] = clean.records[used[k]].tau;
        d[k] = clean.records[used[k]].d;
    }

    // path difference: plain rescale hits the level exactly
    const double d_norm = l2(d);
    const double ud_norm = l2(u_d);
    if (d_norm > 0.0 && ud_norm > 0.0) {
        const double scale = level * d_norm / ud_norm;
        for (std::size_t k = 0; k < used.size(); ++k) noisy.records[used[k]].d = d[k] + scale * u_d[k];
    }

    // transmission: clamping to [0, 1] shrinks the perturbation, so solve for
    // the scale with the clamp applied (the realised error is monotone in it)
    const double tau_norm = l2(tau);
    const double ut_norm = l2(u_tau);
    if (tau_norm > 0.0 && ut_norm > 0.0) {
        const auto realised = [&](double c) {
            double sum = 0.0;
            for (std::size_t k = 0; k < tau.size(); ++k) {
                const double e = std::clamp(tau[k] + c * u_tau[k], 0.0, 1.0) - tau[k];
                sum += e * e;
            }
            return std::sqrt(sum) / tau_norm;
        };
        double lo = 0.0;
        double hi = level * tau_norm / ut_norm;
        for (int k = 0; k < 64 && realised(hi) < level; ++k) {
            lo = hi;
            hi *= 2.0;
        }
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (realised(mid) < level ? lo : hi) = mid;
        }
        const double c = std::abs(realised(lo) - level) <= std::abs(realised(hi) - level) ? lo : hi;
        for (std::size_t k = 0; k < used.size(); ++k)
            noisy.records[used[k]].tau = std::clamp(tau[k] + c * u_tau[k], 0.0, 1.0);
    }
    return noisy;
}

NoiseLevels measure_noise(const Sinogram& clean, const Sinogram& noisy) {
    if (clean.records.size() != noisy.records.size()) throw DataError("sinograms differ in size");
    double tau_err = 0.0, tau_ref = 0.0, d_err = 0.0, d_ref = 0.0;
    for (std::size_t nu = 0; nu < clean.records.size(); ++nu) {
        const auto& a = clean.records[nu];
        if (!a.valid) continue;
        const auto& b = noisy.records[nu];
        tau_err += (a.tau - b.tau) * (a.tau - b.tau);
        tau_ref += a.tau * a.tau;
        d_err += (a.d - b.d) * (a.d - b.d);
        d_ref += a.d * a.d;
    }
    NoiseLevels out;
    if (tau_ref > 0.0) out.tau = std::sqrt(tau_err / tau_ref);
    if (d_ref > 0.0) out.d = std::sqrt(d_err / d_ref);
    return out;
}

}  // namespace thzart::forward
