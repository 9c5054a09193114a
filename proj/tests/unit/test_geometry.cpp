#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thzart/errors.hpp"
#include "thzart/geometry.hpp"
#include "thzart/phantom.hpp"

using namespace thzart;
using namespace thzart::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

bool near(Vec2 a, Vec2 b, double tol) { return distance(a, b) <= tol; }

}  // namespace

TEST_CASE("normal of a horizontal segment points up") {
    const auto seg = InterfaceCurve::segment({0, 0}, {1, 0});
    for (double sigma : {0.0, 0.3, 1.0}) CHECK(near(normal_at(seg, sigma), {0, 1}, 1e-15));
}

TEST_CASE("normal of a diagonal segment") {
    const auto seg = InterfaceCurve::segment({0, 0}, {1, 1});
    CHECK(near(normal_at(seg, 0.5), {-1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-15));
}

TEST_CASE("circle normal is radial") {
    const auto circle = InterfaceCurve::circle({0, 0}, 50);
    const Vec2 n = normal_at(circle, 0.0);
    CHECK(std::abs(std::abs(n.x) - 1.0) < 1e-15);
    CHECK(std::abs(n.y) < 1e-15);
    const double sigma = circle.closest_param({30, 40});
    const Vec2 m = normal_at(circle, sigma);
    CHECK(std::abs(std::abs(dot(m, Vec2{0.6, 0.8})) - 1.0) < 1e-12);
}

TEST_CASE("normal_at rejects parameters outside the curve") {
    const auto seg = InterfaceCurve::segment({0, 0}, {1, 0});
    CHECK_THROWS_AS((void)normal_at(seg, 1.5), DomainError);
    CHECK_THROWS_AS((void)normal_at(seg, -0.1), DomainError);
    const auto arc = InterfaceCurve::arc({0, 0}, 10, 0.0, kPi / 2);
    CHECK_THROWS_AS((void)normal_at(arc, kPi), DomainError);
}

TEST_CASE("normal is perpendicular to the tangent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int k = 0; k < 200; ++k) {
        const auto seg = InterfaceCurve::segment({u(rng), u(rng)}, {u(rng), u(rng)});
        const double sigma = std::uniform_real_distribution<double>(0, 1)(rng);
        const Vec2 t = seg.tangent_at(sigma);
        CHECK(std::abs(dot(normal_at(seg, sigma), t)) <= 1e-12 * norm(t));
        const auto arc = InterfaceCurve::arc({u(rng) / 3, u(rng) / 3}, 5 + std::abs(u(rng)) / 3, -1.0, 2.0);
        const double a_sigma = std::uniform_real_distribution<double>(-1, 2)(rng);
        const Vec2 at = arc.tangent_at(a_sigma);
        CHECK(std::abs(dot(normal_at(arc, a_sigma), at)) <= 1e-12 * norm(at));
        CHECK(std::abs(norm(normal_at(arc, a_sigma)) - 1.0) < 1e-14);
    }
}

TEST_CASE("corner normal averaging") {
    const Vec2 single[] = {{1, 0}};
    CHECK(near(corner_normal(single), {1, 0}, 0));
    const Vec2 right_angle[] = {{1, 0}, {0, 1}};
    CHECK(near(corner_normal(right_angle), {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-15));
    const Vec2 opposite[] = {{1, 0}, {-1, 0}};
    CHECK_THROWS_AS((void)corner_normal(opposite), DegenerateCornerError);
}

TEST_CASE("corner normal of a single unit vector is that vector") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    for (int k = 0; k < 100; ++k) {
        const Vec2 v[] = {omega(ang(rng))};
        CHECK(near(corner_normal(v), v[0], 1e-15));
    }
}

TEST_CASE("nearest hit examples") {
    const InterfaceSet empty(70, {});
    CHECK_FALSE(empty.nearest_hit({-100, 0}, {1, 0}, -1e300).has_value());

    const InterfaceSet circle(70, {InterfaceCurve::circle({0, 0}, 50)});
    const auto axis = circle.nearest_hit({-100, 0}, {1, 0}, -1e300);
    REQUIRE(axis.has_value());
    CHECK(axis->t == doctest::Approx(50).epsilon(1e-14));
    CHECK(near(axis->point, {-50, 0}, 1e-12));
    CHECK(std::abs(std::abs(axis->unit_normal.x) - 1) < 1e-14);
    CHECK_FALSE(axis->is_corner);

    const auto off = circle.nearest_hit({-100, 30}, {1, 0}, -1e300);
    REQUIRE(off.has_value());
    CHECK(near(off->point, {-40, 30}, 1e-12));
    CHECK(off->t == doctest::Approx(60).epsilon(1e-14));
    CHECK(std::abs(std::abs(dot(off->unit_normal, Vec2{-0.8, 0.6})) - 1) < 1e-12);
}

TEST_CASE("nearest hit agrees with a brute-force march along the ray") {
    const auto ph = phantom::circle_rectangle();
    const auto set = ph.interface_set();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    std::uniform_real_distribution<double> off(-60, 60);
    for (int k = 0; k < 50; ++k) {
        const double phi = ang(rng);
        const Vec2 origin = omega(phi) * off(rng) - omega_perp(phi) * 80.0;
        const Vec2 dir = omega_perp(phi);
        const auto hit = set.nearest_hit(origin, dir, 0.0);
        // the first hit is where the distance to the interfaces first vanishes
        double t = 0;
        const double step = 1e-3;
        std::optional<double> marched;
        while (t < 160) {
            if (set.distance_to(origin + dir * t) < step) {
                marched = t;
                break;
            }
            t += step;
        }
        REQUIRE(hit.has_value() == marched.has_value());
        if (hit) CHECK(std::abs(hit->t - *marched) < 0.05);
    }
}

TEST_CASE("successive hits have strictly increasing t") {
    const auto set = phantom::circle_rectangle().interface_set();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    std::uniform_real_distribution<double> off(-69, 69);
    for (int k = 0; k < 300; ++k) {
        const double phi = ang(rng);
        const Vec2 origin = omega(phi) * off(rng);
        const Vec2 dir = omega_perp(phi);
        double t = -1e300;
        int count = 0;
        while (auto hit = set.nearest_hit(origin, dir, t)) {
            CHECK(hit->t > t);
            t = hit->t;
            REQUIRE(++count < 20);
        }
    }
}

TEST_CASE("nearest hit is invariant under rigid rotation") {
    const auto set = phantom::circle_rectangle().interface_set();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    std::uniform_real_distribution<double> off(-65, 65);
    for (int k = 0; k < 200; ++k) {
        const double theta = ang(rng);
        const auto turned = set.rotated(theta);
        const double phi = ang(rng);
        const Vec2 origin = omega(phi) * off(rng) - omega_perp(phi) * 75.0;
        const Vec2 dir = omega_perp(phi);
        const auto a = set.nearest_hit(origin, dir, -1e300);
        const auto b = turned.nearest_hit(rotate(origin, theta), rotate(dir, theta), -1e300);
        REQUIRE(a.has_value() == b.has_value());
        if (!a) continue;
        CHECK(std::abs(a->t - b->t) <= set.tolerance());
        CHECK(distance(rotate(a->point, theta), b->point) <= set.tolerance());
        CHECK(distance(rotate(a->unit_normal, theta), b->unit_normal) <= 1e-9);
        CHECK(a->is_corner == b->is_corner);
    }
}

TEST_CASE("rectangle interfaces register four diagonal corners") {
    const std::vector<phantom::PhantomRegion> regions = {{phantom::Rectangle{{0, 0}, 20, 10}, 1.5, 0.0}};
    const auto set = phantom::interfaces_of(regions, 70);
    CHECK(set.size() == 4);
    REQUIRE(set.corners().size() == 4);
    for (const auto& corner : set.corners()) {
        REQUIRE(corner.normal.has_value());
        CHECK(std::abs(norm(*corner.normal) - 1) < 1e-14);
        CHECK(std::abs(std::abs(corner.normal->x) - 1 / std::sqrt(2.0)) < 1e-14);
        CHECK(std::abs(std::abs(corner.normal->y) - 1 / std::sqrt(2.0)) < 1e-14);
        CHECK(corner.curves.size() == 2);
    }
}

TEST_CASE("a ray through a corner snaps to the averaged normal") {
    const std::vector<phantom::PhantomRegion> regions = {{phantom::Rectangle{{0, 0}, 20, 20}, 1.5, 0.0}};
    const auto set = phantom::interfaces_of(regions, 70);
    const Vec2 dir = normalized(Vec2{1, 1});
    const auto hit = set.nearest_hit(Vec2{-30, -30}, dir, -1e300);
    REQUIRE(hit.has_value());
    CHECK(hit->is_corner);
    CHECK(near(hit->point, {-10, -10}, 1e-9));
    CHECK(std::abs(std::abs(dot(hit->unit_normal, dir)) - 1) < 1e-12);
}

TEST_CASE("interface set validation") {
    CHECK_THROWS_AS(InterfaceSet(40, {InterfaceCurve::circle({0, 0}, 50)}), DomainError);
    CHECK_THROWS_AS((void)InterfaceCurve::segment({1, 1}, {1, 1}), DomainError);
    CHECK_THROWS_AS((void)InterfaceCurve::arc({0, 0}, -1, 0, 1), DomainError);
    CHECK_THROWS_AS((void)InterfaceCurve::arc({0, 0}, 1, 1, 0), DomainError);
    const InterfaceSet empty(70, {});
    CHECK(empty.empty());
    CHECK(std::isinf(empty.distance_to({0, 0})));
}

TEST_CASE("arc crossings respect the angular span") {
    const auto arc = InterfaceCurve::arc({0, 0}, 10, 0.0, kPi);  // upper half
    const auto up = arc.crossings({0, -20}, {0, 1}, 1e-9);
    REQUIRE(up.size() == 1);
    CHECK(up[0].t == doctest::Approx(30));
    const auto across = arc.crossings({-20, 5}, {1, 0}, 1e-9);
    CHECK(across.size() == 2);
    CHECK(arc.crossings({-20, -5}, {1, 0}, 1e-9).empty());
}
