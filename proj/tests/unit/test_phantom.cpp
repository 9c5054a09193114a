#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thzart/errors.hpp"
#include "thzart/phantom.hpp"
#include "thzart/raytrace.hpp"

using namespace thzart;
using namespace thzart::phantom;

namespace {

double analytic_index(const Phantom& ph, Vec2 p) {
    double n = 1.0;
    for (const auto& r : ph.regions)
        if (r.contains(p)) n = r.n;
    return n;
}

}  // namespace

TEST_CASE("rasterising a centred disk") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto field = centered_disk(50, 1.4, 0.05).rasterize(grid);
    CHECK(field.n_minus_1()[70 * 141 + 70] == doctest::Approx(0.4));
    CHECK(field.alpha()[70 * 141 + 70] == doctest::Approx(0.005));  // mm^-1
    CHECK(field.n_minus_1()[70 * 141 + 125] == 0.0);
    std::size_t inside = 0;
    for (std::size_t idx = 0; idx < grid.pixel_count(); ++idx) {
        const bool in = norm(grid.pixel_center(idx)) <= 50.0;
        CHECK((field.n_minus_1()[idx] > 0) == in);
        inside += in;
    }
    CHECK(inside > 7800);
    CHECK(inside < 7900);
}

TEST_CASE("later regions overwrite earlier ones") {
    const GridSpec grid{70, 141, 141, 1.0};
    const auto ph = circle_rectangle();
    const auto field = ph.rasterize(grid);
    CHECK(field.index_at({10, 7.5}) == doctest::Approx(1.7));
    CHECK(field.index_at({-30, 0}) == doctest::Approx(1.4));
    CHECK(field.index_at({0, 60}) == 1.0);
    for (std::size_t idx = 0; idx < grid.pixel_count(); ++idx)
        CHECK(field.index_at(grid.pixel_center(idx)) == doctest::Approx(analytic_index(ph, grid.pixel_center(idx))));
}

TEST_CASE("circle with rectangle has one circle, four edges and four corners") {
    const auto set = circle_rectangle().interface_set();
    CHECK(set.size() == 5);
    std::size_t segments = 0;
    for (const auto& c : set.curves()) segments += c.is_segment();
    CHECK(segments == 4);
    REQUIRE(set.corners().size() == 4);
    for (const auto& corner : set.corners()) {
        CHECK(std::abs(std::abs(corner.point.x - 10) - 12.5) < 1e-12);
        CHECK(std::abs(std::abs(corner.point.y - 7.5) - 10) < 1e-12);
        REQUIRE(corner.normal.has_value());
        CHECK(std::abs(std::abs(corner.normal->x) - std::sqrt(0.5)) < 1e-12);
    }
}

TEST_CASE("probed indices agree with the analytic phantom away from corners") {
    for (const auto& ph : {circle_rectangle(), glued_blocks()}) {
        const GridSpec grid{70, 141, 141, 1.0};
        const auto set = ph.interface_set();
        const auto field = ph.rasterize(grid);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
        std::uniform_real_distribution<double> off(-60, 60);
        std::size_t checked = 0;
        for (int k = 0; k < 400; ++k) {
            const auto path = raytrace::trace(set, field, ang(rng), off(rng));
            for (const auto& e : path.events) {
                bool near_corner = false;
                for (const auto& c : set.corners()) near_corner |= distance(c.point, e.point) < 3.0;
                if (near_corner || e.optics.gamma1 > 1.2) continue;
                const Vec2 back = dot(e.unit_normal, e.incident) > 0 ? -e.unit_normal : e.unit_normal;
                CHECK(e.optics.n1 == doctest::Approx(analytic_index(ph, e.point + back * 1.0)));
                CHECK(e.optics.n2 == doctest::Approx(analytic_index(ph, e.point - back * 1.0)));
                ++checked;
            }
        }
        CHECK(checked > 200);
    }
}

TEST_CASE("glued blocks are five blocks with junction-split edges") {
    const auto ph = glued_blocks();
    ph.validate();
    CHECK(ph.regions.size() == 5);
    const auto set = ph.interface_set();
    CHECK(set.corners().size() >= 10);
    const auto field = ph.rasterize({70, 141, 141, 1.0});
    CHECK(field.index_at({0, 10}) == doctest::Approx(1.70));
    CHECK(field.index_at({20, -10}) == doctest::Approx(1.51));
}

TEST_CASE("presets") {
    for (const char* name : {"circle-rect", "disk", "absorbing-disk", "glued-blocks", "air"}) {
        const auto ph = preset(name);
        CHECK(ph.name == name);
        ph.validate();
    }
    CHECK(preset("air").interface_set().empty());
    CHECK(preset("absorbing-disk").regions[0].n == 1.0);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("invalid regions are rejected") {
    CHECK_THROWS_AS(centered_disk(80, 1.4, 0.05), DomainError);
    CHECK_THROWS_AS(centered_disk(20, 0.9, 0.05), DomainError);
    CHECK_THROWS_AS(centered_disk(20, 1.4, -1.0), DomainError);
}
