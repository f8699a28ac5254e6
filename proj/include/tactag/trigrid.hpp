#ifndef TACTAG_TRIGRID_HPP
#define TACTAG_TRIGRID_HPP

#include <array>
#include <string>
#include <vector>

#include "tactag/geometry.hpp"

namespace tactag {

/// Delaunay-triangulated staggered-row point grid. The triangles are the
/// universe a pattern selects from; adjacency is by shared edge only.
struct TriGrid {
    std::vector<Vec2> points;                      // grid units
    std::vector<std::array<int, 3>> triangles;     // CCW vertex index triples
    std::vector<std::vector<int>> adjacency;       // per-triangle edge neighbors, <= 3
    double extent = 1.0;                           // square side length, grid units
    int divisions = 0;

    std::string id() const;
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    std::array<Vec2, 3> triangle_vertices(int t) const {
        return {points[triangles[t][0]], points[triangles[t][1]], points[triangles[t][2]]};
    }
};

// Row r of divisions+1 rows sits at y = r*extent/divisions. Interior odd rows
// are offset by half the column pitch and lose one point; boundary rows keep
// the full extent.
std::vector<Vec2> staggered_points(int divisions, double extent);

// Throws std::invalid_argument for divisions < 2 or > 64, or extent <= 0.
TriGrid build_staggered_grid(int divisions, double extent);

}  // namespace tactag

#endif
