#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thzart/errors.hpp"
#include "thzart/forward.hpp"
#include "thzart/metrics.hpp"
#include "thzart/phantom.hpp"
#include "thzart/recon.hpp"

using namespace thzart;
using namespace thzart::recon;

namespace {

SystemMatrix single_row(std::vector<std::uint32_t> pixels, std::vector<double> lengths) {
    SystemMatrix m;
    raytrace::SparseRow row;
    row.pixels = std::move(pixels);
    row.lengths = std::move(lengths);
    m.squared_norms.push_back(row.squared_norm());
    m.rows.push_back(std::move(row));
    return m;
}

ReconConfig small_config(std::size_t sweeps, std::size_t iterations, double lambda) {
    ReconConfig cfg;
    cfg.iterations.assign(sweeps, iterations);
    cfg.lambda_ref.assign(sweeps, lambda);
    cfg.lambda_abs.assign(sweeps, lambda);
    return cfg;
}

double mean_over(const std::vector<double>& values, const std::vector<unsigned char>& mask) {
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (mask[k]) sum += values[k], ++count;
    return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("single Kaczmarz step projects onto the hyperplane") {
    const auto m = single_row({0, 1}, {1.0, 1.0});
    std::vector<double> f(2, 0.0);
    const std::vector<double> g{2.0};
    const std::vector<unsigned char> usable{1};
    const auto order = row_order(1, RowOrder::natural, 0);
    kaczmarz_sweep(f, m, g, usable, 1.0, 1, order);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == 1.0);
}

TEST_CASE("relaxed step shrinks the row residual by 1 - lambda") {
    const auto m = single_row({0, 2, 3}, {0.3, 1.1, 0.7});
    for (double lambda : {0.005, 0.3, 1.0, 1.7}) {
        std::vector<double> f{0.2, 5.0, -0.1, 0.4};
        const std::vector<double> g{3.0};
        const double before = g[0] - m.rows[0].dot(f);
        const std::vector<unsigned char> usable{1};
        const auto order = row_order(1, RowOrder::natural, 0);
        kaczmarz_sweep(f, m, g, usable, lambda, 1, order);
        CHECK(g[0] - m.rows[0].dot(f) == doctest::Approx((1 - lambda) * before).epsilon(1e-12));
        CHECK(f[1] == 5.0);  // untouched pixel
    }
}

TEST_CASE("lambda zero and unusable rows leave the estimate unchanged") {
    const auto m = single_row({0, 1}, {1.0, 2.0});
    std::vector<double> f{0.5, 0.25};
    const auto copy = f;
    const auto order = row_order(1, RowOrder::natural, 0);
    kaczmarz_sweep(f, m, std::vector<double>{4.0}, std::vector<unsigned char>{1}, 0.0, 3, order);
    CHECK(f == copy);
    kaczmarz_sweep(f, m, std::vector<double>{4.0}, std::vector<unsigned char>{0}, 1.0, 3, order);
    CHECK(f == copy);
}

TEST_CASE("row orders are permutations and deterministic") {
    const auto natural = row_order(100, RowOrder::natural, 3);
    for (std::size_t k = 0; k < 100; ++k) CHECK(natural[k] == k);
    auto random = row_order(100, RowOrder::random, 3);
    CHECK(random == row_order(100, RowOrder::random, 3));
    CHECK(random != natural);
    std::sort(random.begin(), random.end());
    CHECK(random == natural);
}

TEST_CASE("ray filtering") {
    forward::Sinogram sino;
    sino.geometry = {1, 1, 70};
    sino.records = {{1, -1, 0, -70, 0.0, 0, true}, {1, 0, 0, 0, 0.5, 3, true}, {1, 1, 0, 70, 0.9, 0, false}};
    CHECK(filter_rays(sino, 0.0) == std::vector<unsigned char>{0, 1, 0});
    CHECK(filter_rays(sino, 0.6) == std::vector<unsigned char>{0, 0, 0});
}

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(ReconConfig::synthetic_schedule().validate());
    CHECK_NOTHROW(ReconConfig::conventional_baseline().validate());
    const auto schedule = ReconConfig::synthetic_schedule();
    CHECK(schedule.sweeps() == 5);
    CHECK(schedule.iterations == std::vector<std::size_t>{3, 3, 5, 7, 5});
    auto bad = small_config(2, 1, 0.1);
    bad.lambda_abs.pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config(2, 1, -0.1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config(0, 1, 0.1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config(1, 1, 0.1);
    bad.eps_miss = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero data reconstructs to zero") {
    const GridSpec grid{70, 71, 71, 2.0};
    const auto sino = forward::simulate(MaterialField(grid), geometry::InterfaceSet(70, {}), {30, 20, 70});
    const auto set = phantom::centered_disk(40, 1.4, 0.05).interface_set();
    for (const auto& result :
         {conventional_art(sino, grid, small_config(2, 2, 0.5)), modified_art(sino, set, grid, small_config(2, 2, 0.5))}) {
        for (double v : result.field.n_minus_1()) CHECK(v == 0.0);
        for (double v : result.field.alpha()) CHECK(v == 0.0);
    }
}

TEST_CASE("without interfaces refracted ART reduces to straight-ray ART") {
    const GridSpec grid{70, 71, 71, 2.0};
    const auto ph = phantom::circle_rectangle();
    const auto sino = forward::simulate(ph.rasterize(grid), geometry::InterfaceSet(70, {}), {40, 20, 70});
    const auto cfg = small_config(3, 2, 0.3);
    const auto a = conventional_art(sino, grid, cfg);
    const auto b = modified_art(sino, geometry::InterfaceSet(70, {}), grid, cfg);
    CHECK(a.field.n_minus_1() == b.field.n_minus_1());
    CHECK(a.field.alpha() == b.field.alpha());
}

TEST_CASE("observer sees every sweep; lambda_ref zero keeps n fixed; exterior stays zero") {
    const GridSpec grid{70, 71, 71, 2.0};
    const auto ph = phantom::circle_rectangle();
    const auto set = ph.interface_set();
    const auto sino = forward::simulate(ph.rasterize(grid), set, {40, 20, 70});
    auto cfg = small_config(3, 1, 0.2);
    cfg.exterior_reset = true;
    std::fill(cfg.lambda_ref.begin(), cfg.lambda_ref.end(), 0.0);
    const auto footprint = object_footprint(set, grid);
    std::size_t calls = 0;
    cfg.on_sweep = [&](const SweepLog& log, const MaterialField& f) {
        ++calls;
        CHECK(log.sweep == calls);
        for (double v : f.n_minus_1()) CHECK(v == 0.0);
        for (std::size_t k = 0; k < footprint.size(); ++k)
            if (!footprint[k]) CHECK(f.alpha()[k] == 0.0);
    };
    const auto result = modified_art(sino, set, grid, cfg);
    CHECK(calls == 3);
    CHECK(result.log.size() == 3);
    CHECK(*std::max_element(result.field.alpha().begin(), result.field.alpha().end()) > 0.0);
}

TEST_CASE("object footprint of a disk") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto fp = object_footprint(phantom::centered_disk(50, 1.4, 0.05).interface_set(), grid);
    for (std::size_t k = 0; k < grid.pixel_count(); ++k) {
        const double r = norm(grid.pixel_center(k));
        if (r < 49.5) CHECK(fp[k] == 1);
        if (r > 50.5) CHECK(fp[k] == 0);
    }
    const auto none = object_footprint(geometry::InterfaceSet(70, {}), grid);
    CHECK(std::count(none.begin(), none.end(), 1) == 0);
}

TEST_CASE("Fresnel correction removes spurious absorption") {
    const GridSpec grid{70, 71, 71, 2.0};
    const auto ph = phantom::centered_disk(50, 1.4, 0.05);
    const auto set = ph.interface_set();
    const auto sino = forward::simulate(ph.rasterize(grid.refined(2)), set, {90, 35, 70});
    auto cfg = ReconConfig::synthetic_schedule();
    const auto corrected = modified_art(sino, set, grid, cfg);
    cfg.fresnel_correction = false;
    const auto uncorrected = modified_art(sino, set, grid, cfg);
    const auto inside = ph.footprint(grid);
    CHECK(mean_over(uncorrected.field.alpha(), inside) > mean_over(corrected.field.alpha(), inside));
}

TEST_CASE("no usable rays is an error") {
    const GridSpec grid{70, 71, 71, 2.0};
    const auto sino = forward::simulate(MaterialField(grid), geometry::InterfaceSet(70, {}), {10, 5, 70});
    auto all_invalid = sino;
    for (auto& m : all_invalid.records) m.valid = false;
    auto opaque = sino;
    for (auto& m : opaque.records) m.tau = 0.2;
    auto cfg = small_config(1, 1, 0.1);
    CHECK_THROWS_AS(conventional_art(all_invalid, grid, cfg), EmptyDataError);
    cfg.eps_miss = 0.5;
    CHECK_THROWS_AS(conventional_art(opaque, grid, cfg), EmptyDataError);
    CHECK_THROWS_AS(modified_art(opaque, geometry::InterfaceSet(70, {}), grid, cfg), EmptyDataError);
}

TEST_CASE("kappa channel") {
    MaterialField f(GridSpec{10, 21, 21, 1.0});
    f.alpha()[0] = 0.025;  // mm^-1, i.e. 0.25 cm^-1
    const auto kappa = kappa_channel(f, 100e9);
    CHECK(kappa[0] == doctest::Approx(kappa_from_alpha(0.25, 100e9)));
    CHECK(kappa[1] == 0.0);
}
