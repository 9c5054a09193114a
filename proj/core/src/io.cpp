#include "thzart/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "thzart/errors.hpp"

namespace thzart::io {

namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": '" + key + "' must be finite");
    return x;
}

Vec2 get_point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(where + ": expected a point [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Vec2 get_point(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    return get_point(obj.at(key), where + "." + key);
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

geometry::InterfaceCurve curve_from_json(const json& c, const std::string& where) {
    if (!c.is_object() || !c.contains("type") || !c.at("type").is_string())
        throw ConfigError(where + ": curve needs a string 'type'");
    const auto type = c.at("type").get<std::string>();
    if (type == "segment") {
        require_keys(c, {"type", "a", "b"}, where);
        return geometry::InterfaceCurve::segment(get_point(c, "a", where), get_point(c, "b", where));
    }
    if (type == "arc") {
        require_keys(c, {"type", "center", "radius", "from", "to"}, where);
        const double r = get_number(c, "radius", where);
        if (!(r > 0.0)) throw ConfigError(where + ": arc radius must be positive");
        const double from = get_number(c, "from", where);
        const double to = get_number(c, "to", where);
        if (!(to > from)) throw ConfigError(where + ": arc needs to > from");
        return geometry::InterfaceCurve::arc(get_point(c, "center", where), r, from / kDegPerRad, to / kDegPerRad);
    }
    if (type == "circle") {
        require_keys(c, {"type", "center", "radius"}, where);
        const double r = get_number(c, "radius", where);
        if (!(r > 0.0)) throw ConfigError(where + ": circle radius must be positive");
        return geometry::InterfaceCurve::circle(get_point(c, "center", where), r);
    }
    throw ConfigError(where + ": unknown curve type '" + type + "'");
}

json curve_to_json(const geometry::InterfaceCurve& curve) {
    if (const auto* s = std::get_if<geometry::Segment>(&curve.shape()))
        return {{"type", "segment"}, {"a", point_json(s->a)}, {"b", point_json(s->b)}};
    const auto& a = std::get<geometry::Arc>(curve.shape());
    if (curve.is_closed()) return {{"type", "circle"}, {"center", point_json(a.center)}, {"radius", a.radius}};
    return {{"type", "arc"},
            {"center", point_json(a.center)},
            {"radius", a.radius},
            {"from", a.from * kDegPerRad},
            {"to", a.to * kDegPerRad}};
}

std::vector<geometry::InterfaceCurve> curves_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + ": expected an array of curves");
    std::vector<geometry::InterfaceCurve> curves;
    for (std::size_t k = 0; k < arr.size(); ++k)
        curves.push_back(curve_from_json(arr[k], where + "[" + std::to_string(k) + "]"));
    return curves;
}

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

phantom::PhantomRegion region_from_json(const json& r, const std::string& where) {
    if (!r.is_object() || !r.contains("shape") || !r.at("shape").is_string())
        throw ConfigError(where + ": region needs a string 'shape'");
    const auto shape = r.at("shape").get<std::string>();
    phantom::PhantomRegion region;
    if (shape == "disk") {
        require_keys(r, {"shape", "center", "radius", "n", "alpha"}, where);
        region.shape = phantom::Disk{get_point(r, "center", where), get_number(r, "radius", where)};
    } else if (shape == "rectangle") {
        require_keys(r, {"shape", "center", "size", "n", "alpha"}, where);
        const Vec2 size = get_point(r, "size", where);
        region.shape = phantom::Rectangle{get_point(r, "center", where), size.x, size.y};
    } else if (shape == "polygon") {
        require_keys(r, {"shape", "vertices", "n", "alpha"}, where);
        if (!r.contains("vertices") || !r.at("vertices").is_array())
            throw ConfigError(where + ": polygon needs a 'vertices' array");
        phantom::Polygon poly;
        for (const auto& v : r.at("vertices")) poly.vertices.push_back(get_point(v, where + ".vertices"));
        region.shape = std::move(poly);
    } else {
        throw ConfigError(where + ": unknown shape '" + shape + "'");
    }
    region.n = get_number(r, "n", where);
    region.alpha_per_cm = r.contains("alpha") ? get_number(r, "alpha", where) : 0.0;
    return region;
}

json region_to_json(const phantom::PhantomRegion& region) {
    json out;
    if (const auto* d = std::get_if<phantom::Disk>(&region.shape)) {
        out = {{"shape", "disk"}, {"center", point_json(d->center)}, {"radius", d->radius}};
    } else if (const auto* r = std::get_if<phantom::Rectangle>(&region.shape)) {
        out = {{"shape", "rectangle"}, {"center", point_json(r->center)}, {"size", json::array({r->width, r->height})}};
    } else {
        const auto& p = std::get<phantom::Polygon>(region.shape);
        json verts = json::array();
        for (const auto& v : p.vertices) verts.push_back(point_json(v));
        out = {{"shape", "polygon"}, {"vertices", verts}};
    }
    out["n"] = region.n;
    out["alpha"] = region.alpha_per_cm;
    return out;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw DataError("sinogram line " + std::to_string(line) + ": bad " + name + " '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Scan radius reproducing the recorded outermost offset exactly.
double infer_radius(double s_max, std::size_t q) {
    const auto reproduces = [&](double r) { return ScanGeometry{1, q, r}.offset(static_cast<long>(q)) == s_max; };
    double up = s_max;
    double down = s_max;
    for (int k = 0; k < 8; ++k) {
        if (reproduces(up)) return up;
        if (reproduces(down)) return down;
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, 0.0);
    }
    return s_max;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

geometry::InterfaceSet interfaces_from_json(const std::string& text, double fallback_radius) {
    const auto doc = parse_json(text, "interfaces");
    if (doc.is_array()) {
        if (!(fallback_radius > 0.0)) throw ConfigError("interfaces: a bare curve list needs a domain radius");
        return geometry::InterfaceSet(fallback_radius, curves_from_json(doc, "interfaces"));
    }
    require_keys(doc, {"radius", "tol_geom", "curves"}, "interfaces");
    const double radius = doc.contains("radius") ? get_number(doc, "radius", "interfaces") : fallback_radius;
    if (!(radius > 0.0)) throw ConfigError("interfaces: 'radius' must be positive");
    const double tol = doc.contains("tol_geom") ? get_number(doc, "tol_geom", "interfaces") : geometry::kDefaultTolerance;
    if (!(tol > 0.0)) throw ConfigError("interfaces: 'tol_geom' must be positive");
    if (!doc.contains("curves")) throw ConfigError("interfaces: missing 'curves'");
    try {
        return geometry::InterfaceSet(radius, curves_from_json(doc.at("curves"), "interfaces.curves"), tol);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("interfaces: ") + e.what());
    }
}

std::string interfaces_to_json(const geometry::InterfaceSet& interfaces) {
    json curves = json::array();
    for (const auto& c : interfaces.curves()) curves.push_back(curve_to_json(c));
    const json doc = {{"radius", interfaces.radius()}, {"tol_geom", interfaces.tolerance()}, {"curves", curves}};
    return doc.dump(2) + "\n";
}

geometry::InterfaceSet read_interfaces(const std::filesystem::path& path, double fallback_radius) {
    return interfaces_from_json(read_text(path), fallback_radius);
}

void write_interfaces(const std::filesystem::path& path, const geometry::InterfaceSet& interfaces) {
    write_text(path, interfaces_to_json(interfaces));
}

phantom::Phantom phantom_from_json(const std::string& text) {
    const auto doc = parse_json(text, "phantom");
    require_keys(doc, {"name", "radius", "tol_geom", "regions", "interfaces"}, "phantom");
    phantom::Phantom ph;
    ph.name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "custom";
    if (doc.contains("radius")) ph.domain_radius = get_number(doc, "radius", "phantom");
    if (doc.contains("tol_geom")) ph.tol_geom = get_number(doc, "tol_geom", "phantom");
    if (!doc.contains("regions") || !doc.at("regions").is_array()) throw ConfigError("phantom: missing 'regions' array");
    const auto& regions = doc.at("regions");
    for (std::size_t k = 0; k < regions.size(); ++k)
        ph.regions.push_back(region_from_json(regions[k], "phantom.regions[" + std::to_string(k) + "]"));
    if (doc.contains("interfaces")) ph.interfaces = curves_from_json(doc.at("interfaces"), "phantom.interfaces");
    try {
        ph.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("phantom: ") + e.what());
    }
    return ph;
}

std::string phantom_to_json(const phantom::Phantom& ph) {
    json regions = json::array();
    for (const auto& r : ph.regions) regions.push_back(region_to_json(r));
    json doc = {{"name", ph.name}, {"radius", ph.domain_radius}, {"tol_geom", ph.tol_geom}, {"regions", regions}};
    if (ph.interfaces) {
        json curves = json::array();
        for (const auto& c : *ph.interfaces) curves.push_back(curve_to_json(c));
        doc["interfaces"] = curves;
    }
    return doc.dump(2) + "\n";
}

phantom::Phantom read_phantom(const std::filesystem::path& path) { return phantom_from_json(read_text(path)); }

void write_grid(const std::filesystem::path& base, const GridSpec& grid, std::span<const double> values,
                const std::string& channel, const std::string& units) {
    if (values.size() != grid.pixel_count()) throw DataError("grid data size does not match the grid");
    std::string bytes(values.size() * sizeof(double), '\0');
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto bits = std::bit_cast<std::uint64_t>(values[k]);
        for (std::size_t b = 0; b < 8; ++b) {
            bytes[k * 8 + b] = static_cast<char>(bits & 0xffu);
            bits >>= 8;
        }
    }
    auto raw = base;
    raw += ".f64";
    write_text(raw, bytes);
    const json header = {{"rows", grid.rows}, {"cols", grid.cols}, {"h", grid.pixel_size}, {"R", grid.radius},
                         {"channel", channel}, {"units", units}, {"layout", "row-major, row 0 at top, little-endian f64"}};
    auto meta = base;
    meta += ".json";
    write_text(meta, header.dump(2) + "\n");
}

GridChannel read_grid(const std::filesystem::path& base) {
    auto meta = base;
    meta += ".json";
    const auto header = parse_json(read_text(meta), meta.string());
    GridChannel out;
    try {
        out.grid = GridSpec{header.at("R").get<double>(), header.at("rows").get<std::size_t>(),
                            header.at("cols").get<std::size_t>(), header.at("h").get<double>()};
        out.channel = header.value("channel", "");
        out.units = header.value("units", "");
    } catch (const json::exception& e) {
        throw DataError(meta.string() + ": " + e.what());
    }
    auto raw = base;
    raw += ".f64";
    const auto bytes = read_text(raw);
    if (bytes.size() != out.grid.pixel_count() * sizeof(double))
        throw DataError(raw.string() + ": size does not match its header");
    out.values.resize(out.grid.pixel_count());
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[k * 8 + b])) << (8 * b);
        out.values[k] = std::bit_cast<double>(bits);
    }
    return out;
}

void write_field(const std::filesystem::path& base, const MaterialField& field) {
    auto n_base = base;
    n_base += "_n";
    write_grid(n_base, field.grid(), field.n_minus_1(), "n_minus_1", "1");
    std::vector<double> alpha(field.alpha().size());
    std::transform(field.alpha().begin(), field.alpha().end(), alpha.begin(), [](double a) { return a * kMmPerCm; });
    auto a_base = base;
    a_base += "_alpha";
    write_grid(a_base, field.grid(), alpha, "alpha", "cm^-1");
}

std::string format_sinogram_csv(const forward::Sinogram& sino) {
    std::string out = "i,j,phi_rad,s_mm,tau,d_mm,valid\n";
    out.reserve(out.size() + sino.records.size() * 80);
    for (const auto& r : sino.records) {
        out += std::to_string(r.i);
        out += ',';
        out += std::to_string(r.j);
        out += ',';
        out += format_double(r.phi);
        out += ',';
        out += format_double(r.s);
        out += ',';
        out += format_double(r.tau);
        out += ',';
        out += format_double(r.d);
        out += ',';
        out += r.valid ? '1' : '0';
        out += '\n';
    }
    return out;
}

forward::Sinogram parse_sinogram_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("sinogram: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,j,phi_rad,s_mm,tau,d_mm,valid") throw DataError("sinogram: unexpected header '" + line + "'");

    forward::Sinogram sino;
    std::size_t line_no = 1;
    std::size_t p = 0;
    long q = 0;
    double s_max = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 7) throw DataError("sinogram line " + std::to_string(line_no) + ": expected 7 fields");
        forward::Measurement m;
        m.i = parse_field<std::size_t>(fields[0], line_no, "i");
        m.j = parse_field<long>(fields[1], line_no, "j");
        m.phi = parse_field<double>(fields[2], line_no, "phi_rad");
        m.s = parse_field<double>(fields[3], line_no, "s_mm");
        m.tau = parse_field<double>(fields[4], line_no, "tau");
        m.d = parse_field<double>(fields[5], line_no, "d_mm");
        const int valid = parse_field<int>(fields[6], line_no, "valid");
        if (valid != 0 && valid != 1) throw DataError("sinogram line " + std::to_string(line_no) + ": valid must be 0/1");
        m.valid = valid == 1;
        p = std::max(p, m.i);
        if (m.j > q) {
            q = m.j;
            s_max = m.s;
        }
        sino.records.push_back(m);
    }
    if (sino.records.empty()) throw EmptyDataError("sinogram: no records");
    if (q <= 0) throw DataError("sinogram: no positive offsets, cannot infer the scan radius");
    sino.geometry = ScanGeometry{p, static_cast<std::size_t>(q), infer_radius(s_max, static_cast<std::size_t>(q))};
    try {
        sino.validate();
    } catch (const DomainError& e) {
        throw DataError(std::string("sinogram: ") + e.what());
    }
    return sino;
}

void write_sinogram_csv(const std::filesystem::path& path, const forward::Sinogram& sino) {
    write_text(path, format_sinogram_csv(sino));
}

forward::Sinogram read_sinogram_csv(const std::filesystem::path& path) { return parse_sinogram_csv(read_text(path)); }

void write_pgm16(const std::filesystem::path& path, const GridSpec& grid, std::span<const double> values, double lo,
                 double hi) {
    if (values.size() != grid.pixel_count()) throw DataError("image data size does not match the grid");
    std::string out = "P5\n" + std::to_string(grid.cols) + " " + std::to_string(grid.rows) + "\n65535\n";
    const double span = hi > lo ? hi - lo : 1.0;
    for (const double v : values) {
        const double t = std::clamp((v - lo) / span, 0.0, 1.0);
        const auto level = static_cast<std::uint16_t>(std::lround(t * 65535.0));
        out += static_cast<char>(level >> 8);
        out += static_cast<char>(level & 0xffu);
    }
    write_text(path, out);
}

std::string format_trace_csv(const raytrace::RayPath& path) {
    std::string out = "kind,index,x_mm,y_mm,phi_rad,s_mm,gamma1_rad,gamma2_rad,rho,n1,n2,total_reflection\n";
    const auto vertex = [&](std::size_t k, Vec2 p, const raytrace::PartialRay& r) {
        out += "vertex," + std::to_string(k) + "," + format_double(p.x) + "," + format_double(p.y) + "," +
               format_double(r.phi) + "," + format_double(r.s) + ",,,,,,\n";
    };
    for (std::size_t k = 0; k < path.partials.size(); ++k) vertex(k, path.partials[k].start(), path.partials[k]);
    if (!path.partials.empty()) vertex(path.partials.size(), path.partials.back().end(), path.partials.back());
    for (std::size_t k = 0; k < path.events.size(); ++k) {
        const auto& e = path.events[k];
        out += "event," + std::to_string(k) + "," + format_double(e.point.x) + "," + format_double(e.point.y) + ",,," +
               format_double(e.optics.gamma1) + "," + format_double(e.optics.gamma2) + "," +
               format_double(e.optics.reflectance) + "," + format_double(e.optics.n1) + "," +
               format_double(e.optics.n2) + "," + (e.optics.total_reflection ? "1" : "0") + "\n";
    }
    return out;
}

void write_trace_csv(const std::filesystem::path& path, const raytrace::RayPath& ray) {
    write_text(path, format_trace_csv(ray));
}

std::string format_residual_log(std::span<const recon::SweepLog> log) {
    std::string out = "sweep,iterations,usable_rays,skipped_events,truncated_rows,residual_ref,residual_abs\n";
    for (const auto& e : log) {
        out += std::to_string(e.sweep) + "," + std::to_string(e.iterations) + "," + std::to_string(e.usable_rays) +
               "," + std::to_string(e.skipped_events) + "," + std::to_string(e.truncated_rows) + "," +
               format_double(e.residual_ref) + "," + format_double(e.residual_abs) + "\n";
    }
    return out;
}

}  // namespace thzart::io
