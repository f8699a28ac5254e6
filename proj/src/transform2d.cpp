#include "tactag/transform2d.hpp"

#include <cmath>

namespace tactag {

double normalize_deg(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

Vec2 RigidTransform2D::apply(Vec2 p) const {
    const double r = deg_to_rad(theta_z_deg);
    const double c = std::cos(r), s = std::sin(r);
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

Vec3 RigidTransform2D::apply(Vec3 p) const {
    const Vec2 q = apply(Vec2{p.x, p.y});
    return {q.x, q.y, p.z};
}

RigidTransform2D compose(const RigidTransform2D& a, const RigidTransform2D& b) {
    const Vec2 t = a.apply(Vec2{b.tx, b.ty});
    return {t.x, t.y, normalize_deg(a.theta_z_deg + b.theta_z_deg)};
}

RigidTransform2D inverse(const RigidTransform2D& t) {
    const double r = deg_to_rad(t.theta_z_deg);
    const double c = std::cos(r), s = std::sin(r);
    // R^T applied to -t.
    return {-(c * t.tx + s * t.ty), -(-s * t.tx + c * t.ty), normalize_deg(-t.theta_z_deg)};
}

}  // namespace tactag
