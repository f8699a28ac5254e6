#include "tactag/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace tactag {
namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

TriMesh pattern_to_mesh(const Pattern& pattern, const TriGrid& grid, double scale_mm,
                        double depth_mm) {
    validate_pattern(pattern, grid);
    if (pattern.triangle_ids.empty()) throw std::invalid_argument("empty pattern");
    if (scale_mm <= 0.0) throw std::invalid_argument("scale_mm must be positive");
    if (depth_mm <= 0.0) throw std::invalid_argument("depth_mm must be positive");

    const double s = scale_mm / grid.extent;
    const double half = scale_mm / 2.0;

    // Walls are emitted only for edges used by exactly one selected triangle.
    std::map<std::pair<int, int>, int> edge_use;
    for (int t : pattern.triangle_ids) {
        const auto& tri = grid.triangles[t];
        for (int e = 0; e < 3; ++e) ++edge_use[edge_key(tri[e], tri[(e + 1) % 3])];
    }

    TriMesh mesh;
    std::map<std::pair<int, int>, int> vertex_of;  // (grid point, 0=bottom 1=top)
    auto vid = [&](int p, int level) {
        auto [it, inserted] = vertex_of.try_emplace({p, level}, static_cast<int>(mesh.vertices.size()));
        if (inserted) {
            const Vec2 q = grid.points[p];
            mesh.vertices.push_back({q.x * s - half, q.y * s - half, level ? depth_mm : 0.0});
        }
        return it->second;
    };

    for (int t : pattern.triangle_ids) {
        const auto& tri = grid.triangles[t];
        // Top cap keeps the CCW order (normal +z), bottom cap reverses it.
        mesh.faces.push_back({vid(tri[0], 1), vid(tri[1], 1), vid(tri[2], 1)});
        mesh.faces.push_back({vid(tri[0], 0), vid(tri[2], 0), vid(tri[1], 0)});
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            if (edge_use[edge_key(a, b)] == 2) continue;
            mesh.faces.push_back({vid(a, 0), vid(b, 0), vid(b, 1)});
            mesh.faces.push_back({vid(a, 0), vid(b, 1), vid(a, 1)});
        }
    }
    return mesh;
}

TriMesh subdivide(const TriMesh& mesh, double max_edge) {
    if (max_edge <= 0.0) throw std::invalid_argument("max_edge must be positive");
    TriMesh out;
    out.vertices = mesh.vertices;

    std::map<std::pair<int, int>, int> midpoint_of;
    auto midpoint = [&](int a, int b) {
        auto [it, inserted] = midpoint_of.try_emplace(edge_key(a, b), static_cast<int>(out.vertices.size()));
        if (inserted) out.vertices.push_back(0.5 * (out.vertices[a] + out.vertices[b]));
        return it->second;
    };

    auto split = [&](auto&& self, int a, int b, int c) -> void {
        const double lab = norm(out.vertices[b] - out.vertices[a]);
        const double lbc = norm(out.vertices[c] - out.vertices[b]);
        const double lca = norm(out.vertices[a] - out.vertices[c]);
        const double longest = std::max({lab, lbc, lca});
        if (longest <= max_edge) {
            out.faces.push_back({a, b, c});
            return;
        }
        if (longest == lab) {
            const int m = midpoint(a, b);
            self(self, a, m, c);
            self(self, m, b, c);
        } else if (longest == lbc) {
            const int m = midpoint(b, c);
            self(self, b, m, a);
            self(self, m, c, a);
        } else {
            const int m = midpoint(c, a);
            self(self, c, m, b);
            self(self, m, a, b);
        }
    };
    for (const auto& f : mesh.faces) split(split, f[0], f[1], f[2]);
    return out;
}

double mesh_volume(const TriMesh& mesh) {
    double v6 = 0.0;
    for (const auto& f : mesh.faces)
        v6 += dot(mesh.vertices[f[0]], cross(mesh.vertices[f[1]], mesh.vertices[f[2]]));
    return v6 / 6.0;
}

double mesh_area(const TriMesh& mesh) {
    double a = 0.0;
    for (const auto& f : mesh.faces)
        a += 0.5 * norm(cross(mesh.vertices[f[1]] - mesh.vertices[f[0]],
                              mesh.vertices[f[2]] - mesh.vertices[f[0]]));
    return a;
}

bool is_watertight(const TriMesh& mesh) {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : mesh.faces) {
        if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0]) return false;
        for (int e = 0; e < 3; ++e) ++directed[{f[e], f[(e + 1) % 3]}];
    }
    for (const auto& [edge, n] : directed) {
        const auto rev = directed.find({edge.second, edge.first});
        if (rev == directed.end() || rev->second != n) return false;
    }
    return !mesh.faces.empty();
}

PointCloud surface_vertices(const TriMesh& mesh, double plane_z, bool top_only) {
    PointCloud cloud;
    for (const Vec3& v : mesh.vertices)
        if (!top_only || std::abs(v.z - plane_z) <= 1e-9) cloud.points.push_back(v);
    // Subdivision duplicates vertices at T-junctions; collapse exact repeats so
    // downstream voxel centroids are not weighted by multiplicity.
    auto less = [](const Vec3& a, const Vec3& b) {
        return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    };
    auto eq = [](const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; };
    std::sort(cloud.points.begin(), cloud.points.end(), less);
    cloud.points.erase(std::unique(cloud.points.begin(), cloud.points.end(), eq),
                       cloud.points.end());
    return cloud;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_mm) {
    if (voxel_mm <= 0.0) throw std::invalid_argument("voxel_mm must be positive");
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::pair<Vec3, int>> cells;
    for (const Vec3& p : cloud.points) {
        const auto key = std::make_tuple(static_cast<std::int64_t>(std::floor(p.x / voxel_mm)),
                                         static_cast<std::int64_t>(std::floor(p.y / voxel_mm)),
                                         static_cast<std::int64_t>(std::floor(p.z / voxel_mm)));
        auto& [sum, count] = cells[key];
        sum = sum + p;
        ++count;
    }
    PointCloud out;
    out.points.reserve(cells.size());
    for (const auto& [key, acc] : cells) out.points.push_back((1.0 / acc.second) * acc.first);
    return out;
}

}  // namespace tactag
