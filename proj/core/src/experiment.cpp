#include "thzart/experiment.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "thzart/errors.hpp"
#include "thzart/io.hpp"
#include "thzart/metrics.hpp"

namespace thzart::experiment {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& target, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

const char* order_name(recon::RowOrder order) { return order == recon::RowOrder::random ? "random" : "natural"; }

recon::RowOrder parse_order(const std::string& name) {
    if (name == "natural") return recon::RowOrder::natural;
    if (name == "random") return recon::RowOrder::random;
    throw ConfigError("unknown row order '" + name + "'");
}

json recon_to_json(const recon::ReconConfig& cfg) {
    return {{"iterations", cfg.iterations},
            {"lambda_ref", cfg.lambda_ref},
            {"lambda_abs", cfg.lambda_abs},
            {"eps_miss", cfg.eps_miss},
            {"exterior_reset", cfg.exterior_reset},
            {"fresnel_correction", cfg.fresnel_correction},
            {"order", order_name(cfg.order)},
            {"seed", cfg.seed},
            {"max_refractions", cfg.matrix.trace.max_refractions}};
}

recon::ReconConfig recon_from_json(const json& obj, recon::ReconConfig cfg, const std::string& where) {
    reject_unknown(obj, {"iterations", "lambda_ref", "lambda_abs", "eps_miss", "exterior_reset", "fresnel_correction",
                         "order", "seed", "max_refractions"},
                   where);
    read_opt(obj, "iterations", cfg.iterations, where);
    read_opt(obj, "lambda_ref", cfg.lambda_ref, where);
    read_opt(obj, "lambda_abs", cfg.lambda_abs, where);
    read_opt(obj, "eps_miss", cfg.eps_miss, where);
    read_opt(obj, "exterior_reset", cfg.exterior_reset, where);
    read_opt(obj, "fresnel_correction", cfg.fresnel_correction, where);
    read_opt(obj, "seed", cfg.seed, where);
    read_opt(obj, "max_refractions", cfg.matrix.trace.max_refractions, where);
    if (obj.contains("order")) {
        std::string name;
        read_opt(obj, "order", name, where);
        cfg.order = parse_order(name);
    }
    cfg.validate();
    return cfg;
}

const char* filter_name(fbp::FilterKind kind) { return kind == fbp::FilterKind::ram_lak ? "ram-lak" : "shepp-logan"; }

fbp::FilterKind parse_filter(const std::string& name) {
    if (name == "shepp-logan") return fbp::FilterKind::shepp_logan;
    if (name == "ram-lak") return fbp::FilterKind::ram_lak;
    throw ConfigError("unknown filter '" + name + "'");
}

bool known_method(const std::string& m) { return m == "fbp" || m == "art" || m == "mart" || m == "mart-nofresnel"; }

}  // namespace

void Manifest::validate() const {
    if (p < 2) throw ConfigError("manifest: p must be at least 2");
    if (q < 1) throw ConfigError("manifest: q must be at least 1");
    if (rows == 0 || cols == 0 || !(pixel_size > 0.0)) throw ConfigError("manifest: invalid grid");
    if (forward_refinement == 0) throw ConfigError("manifest: forward_refinement must be positive");
    if (!(noise_level >= 0.0)) throw ConfigError("manifest: noise level must be non-negative");
    if (!(interior_margin >= 0.0)) throw ConfigError("manifest: interior_margin must be non-negative");
    for (const auto* range : {&n_range, &alpha_range})
        if (*range && !((**range)[1] > (**range)[0])) throw ConfigError("manifest: image range needs hi > lo");
    if (methods.empty()) throw ConfigError("manifest: no methods requested");
    for (const auto& m : methods)
        if (!known_method(m)) throw ConfigError("manifest: unknown method '" + m + "'");
    mart.validate();
    art.validate();
    filter.validate();
}

Manifest manifest_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    reject_unknown(doc, {"phantom", "phantom_file", "scan", "grid", "forward_refinement", "noise", "methods", "mart",
                         "art", "fbp", "interior_margin", "images"},
                   "manifest");
    Manifest m;
    read_opt(doc, "phantom", m.phantom, "manifest");
    read_opt(doc, "phantom_file", m.phantom_file, "manifest");
    if (doc.contains("scan")) {
        const auto& s = doc.at("scan");
        reject_unknown(s, {"p", "q"}, "manifest.scan");
        read_opt(s, "p", m.p, "manifest.scan");
        read_opt(s, "q", m.q, "manifest.scan");
    }
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        reject_unknown(g, {"rows", "cols", "h"}, "manifest.grid");
        read_opt(g, "rows", m.rows, "manifest.grid");
        read_opt(g, "cols", m.cols, "manifest.grid");
        read_opt(g, "h", m.pixel_size, "manifest.grid");
    }
    read_opt(doc, "forward_refinement", m.forward_refinement, "manifest");
    if (doc.contains("noise")) {
        const auto& n = doc.at("noise");
        reject_unknown(n, {"level", "seed"}, "manifest.noise");
        read_opt(n, "level", m.noise_level, "manifest.noise");
        read_opt(n, "seed", m.noise_seed, "manifest.noise");
    }
    read_opt(doc, "methods", m.methods, "manifest");
    if (doc.contains("mart")) m.mart = recon_from_json(doc.at("mart"), m.mart, "manifest.mart");
    if (doc.contains("art")) m.art = recon_from_json(doc.at("art"), m.art, "manifest.art");
    if (doc.contains("fbp")) {
        const auto& f = doc.at("fbp");
        reject_unknown(f, {"filter", "cutoff"}, "manifest.fbp");
        std::string name = filter_name(m.filter.kind);
        read_opt(f, "filter", name, "manifest.fbp");
        m.filter.kind = parse_filter(name);
        read_opt(f, "cutoff", m.filter.cutoff, "manifest.fbp");
    }
    read_opt(doc, "interior_margin", m.interior_margin, "manifest");
    if (doc.contains("images")) {
        const auto& im = doc.at("images");
        reject_unknown(im, {"format", "colormap", "n_range", "alpha_range"}, "manifest.images");
        if (im.contains("n_range")) m.n_range.emplace(), read_opt(im, "n_range", *m.n_range, "manifest.images");
        if (im.contains("alpha_range"))
            m.alpha_range.emplace(), read_opt(im, "alpha_range", *m.alpha_range, "manifest.images");
    }
    m.validate();
    return m;
}

std::string manifest_to_json(const Manifest& m) {
    json doc = {{"phantom", m.phantom},
                {"scan", {{"p", m.p}, {"q", m.q}}},
                {"grid", {{"rows", m.rows}, {"cols", m.cols}, {"h", m.pixel_size}}},
                {"forward_refinement", m.forward_refinement},
                {"noise", {{"level", m.noise_level}, {"seed", m.noise_seed}}},
                {"methods", m.methods},
                {"mart", recon_to_json(m.mart)},
                {"art", recon_to_json(m.art)},
                {"fbp", {{"filter", filter_name(m.filter.kind)}, {"cutoff", m.filter.cutoff}}},
                {"interior_margin", m.interior_margin}};
    if (!m.phantom_file.empty()) doc["phantom_file"] = m.phantom_file;
    json images = {{"format", "pgm16"}, {"colormap", "gray"}};
    if (m.n_range) images["n_range"] = *m.n_range;
    if (m.alpha_range) images["alpha_range"] = *m.alpha_range;
    doc["images"] = images;
    return doc.dump(2) + "\n";
}

phantom::Phantom load_phantom(const Manifest& manifest) {
    if (!manifest.phantom_file.empty()) return io::read_phantom(manifest.phantom_file);
    return phantom::preset(manifest.phantom);
}

GridSpec recon_grid(const Manifest& manifest, double radius) {
    GridSpec grid{radius, manifest.rows, manifest.cols, manifest.pixel_size};
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("manifest grid: ") + e.what());
    }
    return grid;
}

MaterialField reconstruct(const std::string& method, const Manifest& manifest, const forward::Sinogram& sino,
                          const geometry::InterfaceSet& interfaces, const GridSpec& grid, unsigned threads,
                          std::vector<recon::SweepLog>* log) {
    if (method == "fbp") return fbp::fbp_reconstruct(sino, grid, manifest.filter, threads);
    recon::ReconResult result;
    if (method == "art") {
        auto cfg = manifest.art;
        cfg.matrix.threads = threads;
        result = recon::conventional_art(sino, grid, cfg);
    } else if (method == "mart" || method == "mart-nofresnel") {
        auto cfg = manifest.mart;
        cfg.matrix.threads = threads;
        if (method == "mart-nofresnel") cfg.fresnel_correction = false;
        result = recon::modified_art(sino, interfaces, grid, cfg);
    } else {
        throw ConfigError("unknown method '" + method + "'");
    }
    if (log) *log = result.log;
    return std::move(result.field);
}

CompareReport run_compare(const Manifest& manifest, const std::filesystem::path& out_dir, bool force,
                          unsigned threads) {
    namespace fs = std::filesystem;
    manifest.validate();
    if (fs::exists(out_dir)) {
        if (!fs::is_directory(out_dir)) throw ConfigError(out_dir.string() + " exists and is not a directory");
        if (!fs::is_empty(out_dir) && !force)
            throw ConfigError(out_dir.string() + " is not empty (use --force to overwrite)");
    }
    fs::create_directories(out_dir);

    const auto ph = load_phantom(manifest);
    const auto interfaces = ph.interface_set();
    const GridSpec grid = recon_grid(manifest, ph.domain_radius);
    const GridSpec fine = grid.refined(manifest.forward_refinement);
    const ScanGeometry scan{manifest.p, manifest.q, ph.domain_radius};

    const auto truth = ph.rasterize(grid);
    const auto truth_fine = ph.rasterize(fine);
    forward::SimulationOptions sim;
    sim.threads = threads;
    const auto clean = forward::simulate(truth_fine, interfaces, scan, sim);
    const auto noisy = forward::add_noise(clean, manifest.noise_level, manifest.noise_seed);

    const auto to_cm = [](std::span<const double> per_mm) {
        std::vector<double> out(per_mm.size());
        std::transform(per_mm.begin(), per_mm.end(), out.begin(), [](double a) { return a * kMmPerCm; });
        return out;
    };
    const auto range_of = [](const std::vector<double>& v) {
        const double hi = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        return std::array<double, 2>{0.0, hi > 0.0 ? hi : 1.0};
    };
    Manifest recorded = manifest;
    if (!recorded.n_range) recorded.n_range = range_of(truth.n_minus_1());
    if (!recorded.alpha_range) recorded.alpha_range = range_of(to_cm(truth.alpha()));
    const auto [n_lo, n_hi] = *recorded.n_range;
    const auto [a_lo, a_hi] = *recorded.alpha_range;

    io::write_text(out_dir / "manifest.json", manifest_to_json(recorded));
    io::write_text(out_dir / "phantom.json", io::phantom_to_json(ph));
    io::write_sinogram_csv(out_dir / "sinogram_clean.csv", clean);
    io::write_sinogram_csv(out_dir / "sinogram.csv", noisy);
    io::write_field(out_dir / "truth", truth);
    io::write_pgm16(out_dir / "truth_n.pgm", grid, truth.n_minus_1(), n_lo, n_hi);
    io::write_pgm16(out_dir / "truth_alpha.pgm", grid, to_cm(truth.alpha()), a_lo, a_hi);

    const auto footprint = ph.footprint(grid);
    const auto interior = metrics::interior_mask(footprint, interfaces, grid, manifest.interior_margin);
    const auto global = metrics::domain_mask(grid);

    CompareReport report;
    report.noise = forward::measure_noise(clean, noisy);
    for (const auto& method : manifest.methods) {
        std::vector<recon::SweepLog> log;
        const auto field = reconstruct(method, manifest, noisy, interfaces, grid, threads, &log);
        io::write_field(out_dir / method, field);
        if (!log.empty()) io::write_text(out_dir / (method + "_residuals.csv"), io::format_residual_log(log));

        const auto err_n = metrics::absolute_error(field.n_minus_1(), truth.n_minus_1());
        const auto err_a = metrics::absolute_error(field.alpha(), truth.alpha());
        io::write_grid(out_dir / (method + "_error_n"), grid, err_n, "abs_error_n_minus_1", "1");
        io::write_grid(out_dir / (method + "_error_alpha"), grid, to_cm(err_a), "abs_error_alpha", "cm^-1");
        io::write_pgm16(out_dir / (method + "_n.pgm"), grid, field.n_minus_1(), n_lo, n_hi);
        io::write_pgm16(out_dir / (method + "_alpha.pgm"), grid, to_cm(field.alpha()), a_lo, a_hi);
        io::write_pgm16(out_dir / (method + "_error_n.pgm"), grid, err_n, 0.0, n_hi - n_lo);

        report.scores.push_back({method, "n", metrics::relative_l2(field.n_minus_1(), truth.n_minus_1(), interior),
                                 metrics::relative_l2(field.n_minus_1(), truth.n_minus_1(), global)});
        report.scores.push_back({method, "alpha", metrics::relative_l2(field.alpha(), truth.alpha(), interior),
                                 metrics::relative_l2(field.alpha(), truth.alpha(), global)});
    }
    io::write_text(out_dir / "summary.csv", format_summary(report));
    io::write_text(out_dir / "noise.csv", "channel,rel_l2\ntau," + io::format_double(report.noise.tau) + "\nd," +
                                              io::format_double(report.noise.d) + "\n");
    return report;
}

std::string format_summary(const CompareReport& report) {
    std::string out = "method,channel,rel_l2_interior,rel_l2_global\n";
    for (const auto& s : report.scores)
        out += s.method + "," + s.channel + "," + io::format_double(s.rel_l2_interior) + "," +
               io::format_double(s.rel_l2_global) + "\n";
    return out;
}

}  // namespace thzart::experiment
