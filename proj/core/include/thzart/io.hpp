#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thzart/forward.hpp"
#include "thzart/geometry.hpp"
#include "thzart/model.hpp"
#include "thzart/phantom.hpp"
#include "thzart/raytrace.hpp"
#include "thzart/recon.hpp"

namespace thzart::io {

// Interface files (JSON, mm, arc angles in degrees):
//   {"radius": 70, "tol_geom": 1e-6,
//    "curves": [{"type": "segment", "a": [x, y], "b": [x, y]},
//               {"type": "arc", "center": [x, y], "radius": r, "from": deg, "to": deg}]}
// A bare array of curves is accepted when `fallback_radius` is positive.
// Unknown keys are rejected with ConfigError.
geometry::InterfaceSet interfaces_from_json(const std::string& text, double fallback_radius = 0.0);
std::string interfaces_to_json(const geometry::InterfaceSet& interfaces);
geometry::InterfaceSet read_interfaces(const std::filesystem::path& path, double fallback_radius = 0.0);
void write_interfaces(const std::filesystem::path& path, const geometry::InterfaceSet& interfaces);

// Phantom files:
//   {"name": "...", "radius": 70, "tol_geom": 1e-6,
//    "regions": [{"shape": "disk", "center": [x, y], "radius": r, "n": 1.4, "alpha": 0.05},
//                {"shape": "rectangle", "center": [x, y], "size": [w, h], "n": ..., "alpha": ...},
//                {"shape": "polygon", "vertices": [[x, y], ...], "n": ..., "alpha": ...}],
//    "interfaces": [curves as above]}   // optional override
// alpha in cm^-1.
phantom::Phantom phantom_from_json(const std::string& text);
std::string phantom_to_json(const phantom::Phantom& phantom);
phantom::Phantom read_phantom(const std::filesystem::path& path);

/// Raw channel file pair: <base>.f64 (little-endian doubles, row-major) and
/// <base>.json (rows, cols, h, R, channel, units).
struct GridChannel {
    GridSpec grid;
    std::string channel;
    std::string units;
    std::vector<double> values;
};
void write_grid(const std::filesystem::path& base, const GridSpec& grid, std::span<const double> values,
                const std::string& channel, const std::string& units);
GridChannel read_grid(const std::filesystem::path& base);

/// Writes <base>_n and <base>_alpha (alpha converted to cm^-1).
void write_field(const std::filesystem::path& base, const MaterialField& field);

/// Sinogram CSV with header `i,j,phi_rad,s_mm,tau,d_mm,valid`; doubles use
/// the shortest representation that parses back to the same bits.
std::string format_sinogram_csv(const forward::Sinogram& sino);
forward::Sinogram parse_sinogram_csv(const std::string& text);
void write_sinogram_csv(const std::filesystem::path& path, const forward::Sinogram& sino);
forward::Sinogram read_sinogram_csv(const std::filesystem::path& path);

/// Binary 16-bit PGM, values mapped linearly from [lo, hi] to [0, 65535].
void write_pgm16(const std::filesystem::path& path, const GridSpec& grid, std::span<const double> values, double lo,
                 double hi);

/// Polyline vertices and per-crossing optics of one traced ray.
std::string format_trace_csv(const raytrace::RayPath& path);
void write_trace_csv(const std::filesystem::path& path, const raytrace::RayPath& ray);

std::string format_residual_log(std::span<const recon::SweepLog> log);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace thzart::io
