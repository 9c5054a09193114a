#pragma once

#include "thzart/model.hpp"
#include "thzart/vec2.hpp"

namespace thzart::optics {

/// Outcome of a ray meeting an interface between indices n1 (incident side)
/// and n2 (far side). Angles are measured from the interface normal.
struct RefractionEvent {
    double n1{1.0};
    double n2{1.0};
    double gamma1{0.0};
    double gamma2{0.0};
    bool total_reflection{false};
    double reflectance{0.0};  // rho, perpendicular polarisation
};

/// Indices are physical media when n >= 1 - kIndexTolerance.
inline constexpr double kIndexTolerance = 1e-9;

/// Snell's law with the total-reflection branch (gamma2 = pi - gamma1, rho = 1).
/// Throws DomainError for non-physical indices or gamma1 outside [0, pi/2].
RefractionEvent snell(double n1, double n2, double gamma1);

/// |(n1 cos g1 - n2 cos g2) / (n1 cos g1 + n2 cos g2)|^2.
double fresnel_reflectance(double n1, double gamma1, double n2, double gamma2);

struct SidedIndices {
    double incident{1.0};  // n1
    double far{1.0};       // n2
};

/// Samples the field a distance `offset` to either side of `hit_point` along
/// the normal. The side the ray comes from gives n1. Samples outside Omega
/// read as air, and reconstructed indices below 1 are read as 1.
SidedIndices probe_two_sided(const MaterialField& field, Vec2 hit_point, Vec2 unit_normal,
                             Vec2 incident_direction, double offset);

}  // namespace thzart::optics
