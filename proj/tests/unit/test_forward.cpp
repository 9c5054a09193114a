#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "thzart/errors.hpp"
#include "thzart/forward.hpp"
#include "thzart/phantom.hpp"

using namespace thzart;
using namespace thzart::forward;

namespace {

const Measurement& at(const Sinogram& sino, std::size_t i, long j) {
    return sino.records[sino.geometry.ray_index(i, j)];
}

}  // namespace

TEST_CASE("air sinogram is trivial") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto sino = simulate(MaterialField(grid), geometry::InterfaceSet(70, {}), {36, 10, 70});
    sino.validate();
    CHECK(sino.size() == 36 * 21);
    for (const auto& m : sino.records) {
        CHECK(m.tau == 1.0);
        CHECK(m.d == 0.0);
        CHECK(m.valid);
    }
}

TEST_CASE("diameter ray through the disk") {
    const GridSpec grid{70, 140, 140, 1.0};  // disk edges fall on pixel edges
    const auto ph = phantom::centered_disk(50, 1.4, 0.05);
    const auto sino = simulate(ph.rasterize(grid), ph.interface_set(), {4, 7, 70});
    for (std::size_t i = 1; i <= 4; ++i) {
        const auto& m = at(sino, i, 0);
        CHECK(m.d == doctest::Approx(40.0).epsilon(1e-12));
        const double rho = std::pow(0.4 / 2.4, 2);
        CHECK(m.tau == doctest::Approx(std::exp(-0.5) * (1 - rho) * (1 - rho)).epsilon(1e-12));
        CHECK(std::abs(m.tau - 0.57325) < 1e-4);
    }
}

TEST_CASE("transmission is bounded and decreases with absorption") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = phantom::circle_rectangle();
    auto field = ph.rasterize(grid);
    const ScanGeometry scan{24, 20, 70};
    const auto base = simulate(field, ph.interface_set(), scan);
    for (auto& a : field.alpha()) a *= 2;
    const auto more = simulate(field, ph.interface_set(), scan);
    for (std::size_t k = 0; k < base.size(); ++k) {
        CHECK(base.records[k].tau >= 0.0);
        CHECK(base.records[k].tau <= 1.0);
        CHECK(base.records[k].d >= 0.0);
        CHECK(more.records[k].tau <= base.records[k].tau);
        CHECK(more.records[k].d == base.records[k].d);
    }
}

TEST_CASE("without interfaces the sinogram equals straight line integrals") {
    const GridSpec grid{32, 65, 65, 1.0};  // offsets never run along pixel edges
    MaterialField field(grid);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (std::size_t k = 0; k < grid.pixel_count(); ++k) {
        if (norm(grid.pixel_center(k)) >= 32) continue;
        field.n_minus_1()[k] = u(rng);
        field.alpha()[k] = 0.01 * u(rng);
    }
    const ScanGeometry scan{30, 16, 32};
    const auto sino = simulate(field, geometry::InterfaceSet(32, {}), scan);
    for (const auto& m : sino.records) {
        CHECK(m.d == doctest::Approx(oracle::line_integral(grid, field.n_minus_1(), m.phi, m.s)).epsilon(1e-10));
        CHECK(-std::log(m.tau) ==
              doctest::Approx(oracle::line_integral(grid, field.alpha(), m.phi, m.s)).epsilon(1e-10));
    }
}

TEST_CASE("refraction changes off-axis measurements") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = phantom::centered_disk(50, 1.4, 0.05);
    const auto field = ph.rasterize(grid);
    const auto bent = simulate(field, ph.interface_set(), {8, 14, 70});
    const auto straight = simulate(field, geometry::InterfaceSet(70, {}), {8, 14, 70});
    CHECK(at(bent, 1, 6).d != doctest::Approx(at(straight, 1, 6).d).epsilon(1e-3));
    // mirror symmetry of the centred disk: s and -s see the same object
    for (long j = 1; j <= 14; ++j) CHECK(at(bent, 1, j).d == doctest::Approx(at(bent, 1, -j).d).epsilon(1e-6));
}

TEST_CASE("detector miss model zeroes strongly deflected rays") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = phantom::centered_disk(50, 1.4, 0.05);
    SimulationOptions opts;
    opts.detector_half_width = 0.5;
    const auto sino = simulate(ph.rasterize(grid), ph.interface_set(), {4, 14, 70}, opts);
    CHECK(at(sino, 1, 0).tau > 0.5);
    CHECK(at(sino, 1, 8).tau == 0.0);
    CHECK(at(sino, 1, 14).tau == 1.0);  // misses the disk entirely
}

TEST_CASE("simulation is independent of the thread count") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = phantom::circle_rectangle();
    const auto field = ph.rasterize(grid);
    SimulationOptions one, many;
    one.threads = 1;
    many.threads = 7;
    CHECK(simulate(field, ph.interface_set(), {20, 15, 70}, one) ==
          simulate(field, ph.interface_set(), {20, 15, 70}, many));
}

TEST_CASE("noise is calibrated, deterministic and optional") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = phantom::circle_rectangle();
    const auto clean = simulate(ph.rasterize(grid), ph.interface_set(), {60, 30, 70});
    CHECK(add_noise(clean, 0.0, 9) == clean);
    const auto noisy = add_noise(clean, 0.05, 9);
    const auto levels = measure_noise(clean, noisy);
    CHECK(std::abs(levels.tau - 0.05) < 1e-3);
    CHECK(std::abs(levels.d - 0.05) < 1e-3);
    CHECK(add_noise(clean, 0.05, 9) == noisy);
    CHECK_FALSE(add_noise(clean, 0.05, 10) == noisy);
    for (const auto& m : noisy.records) {
        CHECK(m.tau >= 0.0);
        CHECK(m.tau <= 1.0);
    }
    CHECK_THROWS(add_noise(clean, -0.1, 1));
}
