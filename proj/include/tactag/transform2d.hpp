#ifndef TACTAG_TRANSFORM2D_HPP
#define TACTAG_TRANSFORM2D_HPP

#include <numbers>

#include "tactag/geometry.hpp"

namespace tactag {

// Wrap to (-180, 180].
double normalize_deg(double deg);

inline double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Planar pose: p' = R(theta_z) p + (tx, ty). Angle stored in degrees.
struct RigidTransform2D {
    double tx = 0.0;   // mm
    double ty = 0.0;   // mm
    double theta_z_deg = 0.0;

    Vec2 apply(Vec2 p) const;
    // Rotates and translates x/y, z passes through.
    Vec3 apply(Vec3 p) const;
};

// a after b: compose(a, b).apply(p) == a.apply(b.apply(p)).
RigidTransform2D compose(const RigidTransform2D& a, const RigidTransform2D& b);

RigidTransform2D inverse(const RigidTransform2D& t);

}  // namespace tactag

#endif
