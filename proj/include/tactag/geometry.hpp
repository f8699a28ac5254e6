#ifndef TACTAG_GEOMETRY_HPP
#define TACTAG_GEOMETRY_HPP

#include <cmath>

namespace tactag {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// Signed doubled area of triangle abc; positive when CCW.
inline double orient2d(Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, c - a);
}

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * std::abs(orient2d(a, b, c));
}

// Inclusive point-in-triangle test (points on an edge count as inside).
inline bool point_in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    const double d1 = orient2d(a, b, p);
    const double d2 = orient2d(b, c, p);
    const double d3 = orient2d(c, a, p);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

}  // namespace tactag

#endif
