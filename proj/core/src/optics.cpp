#include "thzart/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thzart/errors.hpp"

namespace thzart::optics {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kClampWindow = 1e-12;

double clamped_asin(double x) {
    if (x > 1.0 && x <= 1.0 + kClampWindow) x = 1.0;
    if (x < -1.0 && x >= -1.0 - kClampWindow) x = -1.0;
    return std::asin(x);
}

}  // namespace

RefractionEvent snell(double n1, double n2, double gamma1) {
    if (!(n1 >= 1.0 - kIndexTolerance) || !(n2 >= 1.0 - kIndexTolerance))
        throw DomainError("refractive indices must be >= 1");
    if (!(gamma1 >= 0.0 && gamma1 <= kHalfPi + kClampWindow))
        throw DomainError("angle of incidence must lie in [0, pi/2]");
    gamma1 = std::min(gamma1, kHalfPi);

    RefractionEvent ev{n1, n2, gamma1, 0.0, false, 0.0};
    if (n1 > n2 && gamma1 >= std::asin(n2 / n1)) {
        ev.total_reflection = true;
        ev.gamma2 = std::numbers::pi - gamma1;
        ev.reflectance = 1.0;
        return ev;
    }
    if (n1 == n2) {  // matched media: exactly transparent
        ev.gamma2 = gamma1;
        return ev;
    }
    ev.gamma2 = clamped_asin(n1 * std::sin(gamma1) / n2);
    ev.reflectance = fresnel_reflectance(n1, gamma1, n2, ev.gamma2);
    return ev;
}

double fresnel_reflectance(double n1, double gamma1, double n2, double gamma2) {
    const double a = n1 * std::cos(gamma1);
    const double b = n2 * std::cos(gamma2);
    const double sum = a + b;
    if (sum == 0.0) return 1.0;  // grazing on both sides
    const double r = (a - b) / sum;
    return std::clamp(r * r, 0.0, 1.0);
}

SidedIndices probe_two_sided(const MaterialField& field, Vec2 hit_point, Vec2 unit_normal,
                             Vec2 incident_direction, double offset) {
    // normal oriented along the propagation direction
    const Vec2 forward = dot(incident_direction, unit_normal) > 0.0 ? unit_normal : -unit_normal;
    const double behind = field.index_at(hit_point - forward * offset);
    const double ahead = field.index_at(hit_point + forward * offset);
    return {std::max(1.0, behind), std::max(1.0, ahead)};
}

}  // namespace thzart::optics
