#ifndef TACTAG_MESH_HPP
#define TACTAG_MESH_HPP

#include <array>
#include <vector>

#include "tactag/geometry.hpp"
#include "tactag/pattern.hpp"
#include "tactag/trigrid.hpp"

namespace tactag {

struct TriMesh {
    std::vector<Vec3> vertices;               // mm
    std::vector<std::array<int, 3>> faces;    // CCW as seen from outside

    int face_count() const { return static_cast<int>(faces.size()); }
};

// Selected triangles extruded to prisms of height depth_mm, z in [0, depth].
// Interior walls between edge-adjacent selected triangles are omitted, so the
// result is the watertight union. x/y are pattern-centered mm (the mask frame).
TriMesh pattern_to_mesh(const Pattern& pattern, const TriGrid& grid, double scale_mm,
                        double depth_mm);

// Longest-edge midpoint bisection per face until every edge <= max_edge.
// Children tile their parent exactly, so surface area and enclosed volume are
// unchanged. A mesh already within the bound is returned as-is.
TriMesh subdivide(const TriMesh& mesh, double max_edge);

// Signed volume by divergence theorem; positive for outward-oriented closed meshes.
double mesh_volume(const TriMesh& mesh);

double mesh_area(const TriMesh& mesh);

// Closed-surface test: every directed edge is balanced by an equal number of
// opposite-direction copies. Two pattern triangles touching only at a vertex
// pinch the prism surface there, doubling a vertical edge in both directions;
// such pinches are closed solids and pass. Boundary edges, flipped faces and
// doubled faces do not.
bool is_watertight(const TriMesh& mesh);

struct PointCloud {
    std::vector<Vec3> points;  // mm

    int size() const { return static_cast<int>(points.size()); }
};

// Vertices of the mesh lying on the z = plane_z surface (the face the sensor
// sees); all vertices when top_only is false.
PointCloud surface_vertices(const TriMesh& mesh, double plane_z, bool top_only = true);

// One centroid per occupied voxel, output ordered by voxel index. Empty input
// gives empty output.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_mm);

}  // namespace tactag

#endif
