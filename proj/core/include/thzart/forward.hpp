#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "thzart/geometry.hpp"
#include "thzart/model.hpp"
#include "thzart/raytrace.hpp"

namespace thzart::forward {

/// One parallel-beam measurement: transmission tau = I / I0 and path
/// difference d = c0 (T - T0) in mm.
struct Measurement {
    std::size_t i{1};  // angle index, 1..p
    long j{0};         // offset index, -q..q
    double phi{0.0};
    double s{0.0};
    double tau{1.0};
    double d{0.0};
    bool valid{true};

    bool operator==(const Measurement&) const = default;
};

/// Measurements in angle-major (i, j) order.
struct Sinogram {
    ScanGeometry geometry;
    std::vector<Measurement> records;

    [[nodiscard]] std::size_t size() const { return records.size(); }
    /// Throws DataError if the record layout does not match the geometry.
    void validate() const;

    bool operator==(const Sinogram&) const = default;
};

struct SimulationOptions {
    raytrace::TraceOptions trace;
    unsigned threads{0};
    /// Optional detector-miss model: when positive, a ray whose exit point
    /// lies farther than this from the straight-line detector position, or
    /// which leaves backwards, records tau = 0.
    double detector_half_width{0.0};
};

/// Traces every ray of `geometry` through the ground truth and integrates
/// d = int (n - 1) and tau = exp(-int alpha) * C_abs along the refracted path.
/// Truncated rays are marked invalid.
Sinogram simulate(const MaterialField& field, const geometry::InterfaceSet& interfaces, const ScanGeometry& geometry,
                  const SimulationOptions& options = {});

/// Adds zero-mean uniform noise to tau and d independently, scaled so that
/// ||g - g_noisy|| / ||g|| equals `level` for each channel over the valid
/// records. tau is clamped to [0, 1]; the tau scale is solved with the clamp
/// in place. Deterministic for a given seed.
Sinogram add_noise(const Sinogram& clean, double level, std::uint64_t seed);

struct NoiseLevels {
    double tau{0.0};
    double d{0.0};
};

/// Realised relative l2 perturbation per channel over the valid records.
NoiseLevels measure_noise(const Sinogram& clean, const Sinogram& noisy);

}  // namespace thzart::forward
