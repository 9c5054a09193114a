#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

#include "thzart/fbp.hpp"
#include "thzart/forward.hpp"
#include "thzart/model.hpp"
#include "thzart/phantom.hpp"
#include "thzart/recon.hpp"

namespace thzart::experiment {

/// Everything needed to reproduce a phantom -> sinogram -> reconstruction run.
/// Serialised as JSON; unknown keys are rejected.
struct Manifest {
    std::string phantom{"circle-rect"};  // preset name, ignored when phantom_file is set
    std::string phantom_file;
    std::size_t p{360};
    std::size_t q{70};
    std::size_t rows{141};
    std::size_t cols{141};
    double pixel_size{1.0};
    /// Ground truth for the forward simulation is rasterised on a grid this
    /// many times finer than the reconstruction grid.
    std::size_t forward_refinement{2};
    double noise_level{0.05};
    std::uint64_t noise_seed{1};
    std::vector<std::string> methods{"fbp", "art", "mart"};
    recon::ReconConfig mart{recon::ReconConfig::synthetic_schedule()};
    recon::ReconConfig art{recon::ReconConfig::conventional_baseline()};
    fbp::FilterSpec filter;
    /// Interior metric excludes pixels within this distance (mm) of an interface.
    double interior_margin{2.0};
    /// Grey-level ranges of the PGM exports (n - 1, and alpha in cm^-1);
    /// filled from the ground truth when absent and recorded in the output copy.
    std::optional<std::array<double, 2>> n_range;
    std::optional<std::array<double, 2>> alpha_range;

    void validate() const;
};

Manifest manifest_from_json(const std::string& text);
std::string manifest_to_json(const Manifest& manifest);

/// Phantom named by the manifest (preset or file).
phantom::Phantom load_phantom(const Manifest& manifest);
GridSpec recon_grid(const Manifest& manifest, double radius);

struct MethodScore {
    std::string method;
    std::string channel;  // "n" or "alpha"
    double rel_l2_interior{0.0};
    double rel_l2_global{0.0};
};

struct CompareReport {
    forward::NoiseLevels noise;
    std::vector<MethodScore> scores;
};

/// Reconstruction for one method name: "fbp", "art", "mart" or "mart-nofresnel".
MaterialField reconstruct(const std::string& method, const Manifest& manifest, const forward::Sinogram& sino,
                          const geometry::InterfaceSet& interfaces, const GridSpec& grid, unsigned threads,
                          std::vector<recon::SweepLog>* log = nullptr);

/// Runs the full comparison and writes its artefacts into `out_dir`, which
/// must be empty or absent unless `force` is set.
CompareReport run_compare(const Manifest& manifest, const std::filesystem::path& out_dir, bool force,
                          unsigned threads = 0);

std::string format_summary(const CompareReport& report);

}  // namespace thzart::experiment
