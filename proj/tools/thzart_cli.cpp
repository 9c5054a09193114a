#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thzart/errors.hpp"
#include "thzart/experiment.hpp"
#include "thzart/fbp.hpp"
#include "thzart/forward.hpp"
#include "thzart/io.hpp"
#include "thzart/phantom.hpp"
#include "thzart/raytrace.hpp"
#include "thzart/recon.hpp"

namespace {

using namespace thzart;

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        std::istringstream in(item);
        T value{};
        if (!(in >> value) || !in.eof()) throw ConfigError(std::string("bad value '") + item + "' in " + what);
        out.push_back(value);
    }
    if (out.empty()) throw ConfigError(std::string(what) + " must not be empty");
    return out;
}

GridSpec parse_grid(const std::string& text, double radius) {
    const auto parts = split_list(text);
    if (parts.size() != 3) throw ConfigError("--grid expects rows,cols,h");
    const auto rows = parse_list<std::size_t>(parts[0], "--grid rows")[0];
    const auto cols = parse_list<std::size_t>(parts[1], "--grid cols")[0];
    const auto h = parse_list<double>(parts[2], "--grid h")[0];
    GridSpec grid{radius, rows, cols, h};
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("--grid: ") + e.what());
    }
    return grid;
}

/// Turns a JSON object of {"flag-name": value} into command-line tokens.
std::vector<std::string> config_tokens(const std::filesystem::path& path) {
    const auto doc = nlohmann::json::parse(io::read_text(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") throw ConfigError(path.string() + ": nested 'config' is not allowed");
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            tokens.push_back(flag + (value.get<bool>() ? "=true" : "=false"));
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!joined.empty()) joined += ',';
                joined += v.is_string() ? v.get<std::string>() : v.dump();
            }
            tokens.push_back(flag);
            tokens.push_back(joined);
        } else if (value.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(value.is_number_float() ? io::format_double(value.get<double>()) : value.dump());
        } else {
            throw ConfigError(path.string() + ": unsupported value for '" + key + "'");
        }
    }
    return tokens;
}

/// Values from --config are appended after the command line, so with the
/// take-last policy the configuration file wins over explicit flags.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> extra;
    for (std::size_t k = 0; k < args.size(); ++k) {
        std::string path;
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
        } else if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
        } else {
            continue;
        }
        const auto tokens = config_tokens(path);
        extra.insert(extra.end(), tokens.begin(), tokens.end());
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

phantom::Phantom pick_phantom(const std::string& preset, const std::string& file) {
    if (!file.empty()) return io::read_phantom(file);
    return phantom::preset(preset);
}

void write_images(const std::filesystem::path& base, const MaterialField& field) {
    const auto& n = field.n_minus_1();
    std::vector<double> alpha_cm(field.alpha().size());
    for (std::size_t k = 0; k < alpha_cm.size(); ++k) alpha_cm[k] = field.alpha()[k] * kMmPerCm;
    const auto hi = [](const std::vector<double>& v) {
        const double m = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        return m > 0.0 ? m : 1.0;
    };
    auto n_path = base;
    n_path += "_n.pgm";
    auto a_path = base;
    a_path += "_alpha.pgm";
    io::write_pgm16(n_path, field.grid(), n, 0.0, hi(n));
    io::write_pgm16(a_path, field.grid(), alpha_cm, 0.0, hi(alpha_cm));
}

struct PhantomArgs {
    std::string preset{"circle-rect"};
    std::string file;
    std::string grid{"141,141,1"};
    std::string out{"phantom"};
};

struct ForwardArgs {
    std::string preset{"circle-rect"};
    std::string file;
    std::size_t p{360};
    std::size_t q{70};
    double radius{0.0};
    std::string grid{"141,141,1"};
    std::size_t fine{2};
    double noise{0.0};
    std::uint64_t seed{1};
    double detector_half_width{0.0};
    std::string out{"sinogram.csv"};
    std::string clean_out;
    unsigned threads{0};
};

struct ReconArgs {
    std::string method{"mart"};
    std::string sinogram;
    std::string interfaces;
    std::string grid{"141,141,1"};
    std::string psi{"3,3,5,7,5"};
    std::string lambda_ref{"0.01,0.01,0.006,0.002,0"};
    std::string lambda_abs{"0.002,0.004,0.004,0.004,0.003"};
    double eps_miss{0.0};
    bool exterior_reset{false};
    bool no_fresnel{false};
    std::string order{"natural"};
    std::uint64_t seed{0};
    std::string filter{"shepp-logan"};
    double cutoff{1.0};
    std::size_t max_refractions{64};
    std::string out{"recon"};
    unsigned threads{0};
};

struct CompareArgs {
    std::string manifest;
    std::string out{"compare"};
    bool force{false};
    unsigned threads{0};
};

struct TraceArgs {
    std::string preset{"circle-rect"};
    std::string file;
    std::string grid{"141,141,1"};
    double phi{0.0};
    double s{0.0};
    std::string out;
};

int run_phantom(const PhantomArgs& a) {
    const auto ph = pick_phantom(a.preset, a.file);
    const auto grid = parse_grid(a.grid, ph.domain_radius);
    const auto field = ph.rasterize(grid);
    const std::filesystem::path base = a.out;
    io::write_field(base, field);
    write_images(base, field);
    auto iface = base;
    iface += "_interfaces.json";
    io::write_interfaces(iface, ph.interface_set());
    auto desc = base;
    desc += "_phantom.json";
    io::write_text(desc, io::phantom_to_json(ph));
    std::cout << "wrote " << base.string() << "_{n,alpha}.{f64,json,pgm}, interfaces and phantom description\n";
    return kOk;
}

int run_forward(const ForwardArgs& a) {
    const auto ph = pick_phantom(a.preset, a.file);
    const double radius = a.radius > 0.0 ? a.radius : ph.domain_radius;
    if (radius != ph.domain_radius) throw ConfigError("--radius must match the phantom's domain radius");
    if (a.fine == 0) throw ConfigError("--fine must be positive");
    const auto grid = parse_grid(a.grid, radius);
    const ScanGeometry scan{a.p, a.q, radius};
    try {
        scan.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    forward::SimulationOptions opts;
    opts.threads = a.threads;
    opts.detector_half_width = a.detector_half_width;
    const auto clean = forward::simulate(ph.rasterize(grid.refined(a.fine)), ph.interface_set(), scan, opts);
    if (!a.clean_out.empty()) io::write_sinogram_csv(a.clean_out, clean);
    const auto noisy = forward::add_noise(clean, a.noise, a.seed);
    io::write_sinogram_csv(a.out, noisy);
    const auto levels = forward::measure_noise(clean, noisy);
    std::cout << "wrote " << a.out << " (" << noisy.size() << " rays, noise tau " << levels.tau << ", d " << levels.d
              << ")\n";
    return kOk;
}

int run_recon(const ReconArgs& a) {
    if (a.sinogram.empty()) throw ConfigError("--sinogram is required");
    const auto sino = io::read_sinogram_csv(a.sinogram);
    const auto grid = parse_grid(a.grid, sino.geometry.radius);
    const std::filesystem::path base = a.out;

    MaterialField field;
    std::vector<recon::SweepLog> log;
    if (a.method == "fbp") {
        fbp::FilterSpec filter;
        if (a.filter == "shepp-logan") {
            filter.kind = fbp::FilterKind::shepp_logan;
        } else if (a.filter == "ram-lak") {
            filter.kind = fbp::FilterKind::ram_lak;
        } else {
            throw ConfigError("unknown --filter '" + a.filter + "'");
        }
        filter.cutoff = a.cutoff;
        field = fbp::fbp_reconstruct(sino, grid, filter, a.threads);
    } else if (a.method == "art" || a.method == "mart") {
        recon::ReconConfig cfg;
        cfg.iterations = parse_list<std::size_t>(a.psi, "--psi");
        cfg.lambda_ref = parse_list<double>(a.lambda_ref, "--lambda-ref");
        cfg.lambda_abs = parse_list<double>(a.lambda_abs, "--lambda-abs");
        cfg.eps_miss = a.eps_miss;
        cfg.exterior_reset = a.exterior_reset;
        cfg.fresnel_correction = !a.no_fresnel;
        cfg.seed = a.seed;
        if (a.order == "natural") {
            cfg.order = recon::RowOrder::natural;
        } else if (a.order == "random") {
            cfg.order = recon::RowOrder::random;
        } else {
            throw ConfigError("unknown --order '" + a.order + "'");
        }
        cfg.matrix.threads = a.threads;
        cfg.matrix.trace.max_refractions = a.max_refractions;
        recon::ReconResult result;
        if (a.method == "art") {
            result = recon::conventional_art(sino, grid, cfg);
        } else {
            if (a.interfaces.empty()) throw ConfigError("--interfaces is required for --method mart");
            const auto interfaces = io::read_interfaces(a.interfaces, sino.geometry.radius);
            if (interfaces.radius() != sino.geometry.radius)
                throw ConfigError("interface radius differs from the sinogram's scan radius");
            result = recon::modified_art(sino, interfaces, grid, cfg);
        }
        field = std::move(result.field);
        log = std::move(result.log);
        auto log_path = base;
        log_path += "_residuals.csv";
        io::write_text(log_path, io::format_residual_log(log));
    } else {
        throw ConfigError("unknown --method '" + a.method + "'");
    }
    io::write_field(base, field);
    write_images(base, field);
    std::cout << "wrote " << base.string() << "_{n,alpha}\n";
    for (const auto& e : log)
        std::cout << "sweep " << e.sweep << ": " << e.usable_rays << " rays, residual ref " << e.residual_ref
                  << ", abs " << e.residual_abs << "\n";
    return kOk;
}

int run_compare_cmd(const CompareArgs& a) {
    experiment::Manifest manifest;
    if (!a.manifest.empty()) manifest = experiment::manifest_from_json(io::read_text(a.manifest));
    const auto report = experiment::run_compare(manifest, a.out, a.force, a.threads);
    std::cout << experiment::format_summary(report);
    return kOk;
}

int run_trace(const TraceArgs& a) {
    const auto ph = pick_phantom(a.preset, a.file);
    const auto grid = parse_grid(a.grid, ph.domain_radius);
    const auto path = raytrace::trace(ph.interface_set(), ph.rasterize(grid), a.phi, a.s);
    const auto text = io::format_trace_csv(path);
    if (a.out.empty()) {
        std::cout << text;
    } else {
        io::write_text(a.out, text);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refraction-aware terahertz tomography: phantoms, forward simulation, reconstruction"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    const auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "JSON object of flag values; these override flags given on the command line");
    };

    PhantomArgs pa;
    auto* phantom_cmd = app.add_subcommand("phantom", "Rasterise a phantom and export its interfaces");
    phantom_cmd->add_option("--preset", pa.preset, "circle-rect | disk | absorbing-disk | glued-blocks | air")
        ->capture_default_str();
    phantom_cmd->add_option("--phantom-file", pa.file, "Phantom description (JSON)");
    phantom_cmd->add_option("--grid", pa.grid, "rows,cols,h (mm)")->capture_default_str();
    phantom_cmd->add_option("--out", pa.out, "Output prefix")->capture_default_str();
    add_config(phantom_cmd);

    ForwardArgs fa;
    auto* forward_cmd = app.add_subcommand("forward", "Simulate a refracted-ray sinogram");
    forward_cmd->add_option("--preset", fa.preset, "Phantom preset")->capture_default_str();
    forward_cmd->add_option("--phantom-file", fa.file, "Phantom description (JSON)");
    forward_cmd->add_option("-p,--angles", fa.p, "Number of angles p")->capture_default_str();
    forward_cmd->add_option("-q,--offsets", fa.q, "Offsets per side q (2q+1 per angle)")->capture_default_str();
    forward_cmd->add_option("--radius", fa.radius, "Domain radius R in mm (default: phantom's)");
    forward_cmd->add_option("--grid", fa.grid, "Ground-truth grid rows,cols,h before refinement")
        ->capture_default_str();
    forward_cmd->add_option("--fine", fa.fine, "Ground-truth refinement factor")->capture_default_str();
    forward_cmd->add_option("--noise", fa.noise, "Relative l2 noise level per channel")->capture_default_str();
    forward_cmd->add_option("--seed", fa.seed, "Noise seed")->capture_default_str();
    forward_cmd->add_option("--detector-half-width", fa.detector_half_width,
                            "Optional detector-miss model half width (mm); 0 disables");
    forward_cmd->add_option("--out", fa.out, "Sinogram CSV")->capture_default_str();
    forward_cmd->add_option("--clean-out", fa.clean_out, "Also write the noiseless sinogram");
    forward_cmd->add_option("--threads", fa.threads, "Worker threads (0 = auto)")->capture_default_str();
    add_config(forward_cmd);

    ReconArgs ra;
    auto* recon_cmd = app.add_subcommand("recon", "Reconstruct (n - 1, alpha) from a sinogram");
    recon_cmd->add_option("--method", ra.method, "fbp | art | mart")->capture_default_str();
    recon_cmd->add_option("--sinogram", ra.sinogram, "Sinogram CSV");
    recon_cmd->add_option("--interfaces", ra.interfaces, "Interface file (JSON), required for mart");
    recon_cmd->add_option("--grid", ra.grid, "rows,cols,h (mm)")->capture_default_str();
    recon_cmd->add_option("--psi", ra.psi, "Kaczmarz passes per outer sweep")->capture_default_str();
    recon_cmd->add_option("--lambda-ref", ra.lambda_ref, "Relaxation per sweep, n channel")->capture_default_str();
    recon_cmd->add_option("--lambda-abs", ra.lambda_abs, "Relaxation per sweep, alpha channel")
        ->capture_default_str();
    recon_cmd->add_option("--eps-miss", ra.eps_miss, "Drop rays with tau <= eps")->capture_default_str();
    recon_cmd->add_flag("--exterior-reset", ra.exterior_reset, "Zero the estimate outside the object footprint");
    recon_cmd->add_flag("--no-fresnel", ra.no_fresnel, "Disable the Fresnel loss correction");
    recon_cmd->add_option("--order", ra.order, "natural | random")->capture_default_str();
    recon_cmd->add_option("--seed", ra.seed, "Seed for the random row order")->capture_default_str();
    recon_cmd->add_option("--filter", ra.filter, "FBP filter: shepp-logan | ram-lak")->capture_default_str();
    recon_cmd->add_option("--cutoff", ra.cutoff, "FBP cutoff as a fraction of Nyquist")->capture_default_str();
    recon_cmd->add_option("--max-refractions", ra.max_refractions, "Crossings before a ray is truncated")
        ->capture_default_str();
    recon_cmd->add_option("--out", ra.out, "Output prefix")->capture_default_str();
    recon_cmd->add_option("--threads", ra.threads, "Worker threads (0 = auto)")->capture_default_str();
    add_config(recon_cmd);

    CompareArgs ca;
    auto* compare_cmd = app.add_subcommand("compare", "Run FBP, ART and modified ART on one synthetic data set");
    compare_cmd->add_option("--manifest", ca.manifest, "Experiment manifest (JSON); defaults reproduce the "
                                                       "circle-rectangle experiment");
    compare_cmd->add_option("--out", ca.out, "Output directory")->capture_default_str();
    compare_cmd->add_flag("--force", ca.force, "Allow writing into a non-empty directory");
    compare_cmd->add_option("--threads", ca.threads, "Worker threads (0 = auto)")->capture_default_str();
    add_config(compare_cmd);

    TraceArgs ta;
    auto* trace_cmd = app.add_subcommand("trace-debug", "Dump one traced ray's polyline and crossings");
    trace_cmd->add_option("--preset", ta.preset, "Phantom preset")->capture_default_str();
    trace_cmd->add_option("--phantom-file", ta.file, "Phantom description (JSON)");
    trace_cmd->add_option("--grid", ta.grid, "rows,cols,h (mm) used to sample the index")->capture_default_str();
    trace_cmd->add_option("--phi", ta.phi, "Ray angle (rad)")->capture_default_str();
    trace_cmd->add_option("--s", ta.s, "Signed ray offset (mm)")->capture_default_str();
    trace_cmd->add_option("--out", ta.out, "CSV path (default: stdout)");
    add_config(trace_cmd);

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }

    try {
        if (*phantom_cmd) return run_phantom(pa);
        if (*forward_cmd) return run_forward(fa);
        if (*recon_cmd) return run_recon(ra);
        if (*compare_cmd) return run_compare_cmd(ca);
        if (*trace_cmd) return run_trace(ta);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const EmptyDataError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
    return kConfig;
}
