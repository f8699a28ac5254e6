#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <tactag/mesh.hpp>
#include <tactag/pattern.hpp>
#include <tactag/rng.hpp>
#include <tactag/trigrid.hpp>

using namespace tactag;

namespace {

double pattern_area_mm2(const Pattern& p, const TriGrid& g, double scale_mm) {
    const double s = scale_mm / g.extent;
    double a = 0.0;
    for (int id : p.triangle_ids) {
        const auto v = g.triangle_vertices(id);
        a += triangle_area(v[0], v[1], v[2]);
    }
    return a * s * s;
}

double max_edge_length(const TriMesh& m) {
    double longest = 0.0;
    for (const auto& f : m.faces)
        for (int e = 0; e < 3; ++e)
            longest = std::max(longest, norm(m.vertices[f[(e + 1) % 3]] - m.vertices[f[e]]));
    return longest;
}

std::vector<std::tuple<double, double, double>> sorted_points(const PointCloud& c) {
    std::vector<std::tuple<double, double, double>> v;
    for (const Vec3& p : c.points) v.emplace_back(p.x, p.y, p.z);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("a single triangle extrudes to a closed prism") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const Pattern p{{0}, grid.id()};
    const double depth = 1.0, scale = 5.0;
    const TriMesh mesh = pattern_to_mesh(p, grid, scale, depth);

    // Two caps plus two wall triangles per edge.
    CHECK(mesh.face_count() == 8);
    CHECK(mesh.vertices.size() == 6);
    CHECK(is_watertight(mesh));

    const double base = pattern_area_mm2(p, grid, scale);
    CHECK(mesh_volume(mesh) == doctest::Approx(base * depth).epsilon(1e-6));

    const auto v = grid.triangle_vertices(0);
    const double s = scale / grid.extent;
    const double perimeter = s * (norm(v[1] - v[0]) + norm(v[2] - v[1]) + norm(v[0] - v[2]));
    CHECK(mesh_area(mesh) == doctest::Approx(2.0 * base + perimeter * depth).epsilon(1e-6));
}

TEST_CASE("adjacent prisms merge without interior walls") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    REQUIRE_FALSE(grid.adjacency[0].empty());
    int nb = grid.adjacency[0][0];
    std::vector<int> ids = {0, nb};
    std::sort(ids.begin(), ids.end());
    const Pattern p{ids, grid.id()};
    const TriMesh mesh = pattern_to_mesh(p, grid, 5.0, 1.0);

    // 4 caps + 4 outer edges * 2 walls; the shared edge contributes nothing.
    CHECK(mesh.face_count() == 12);
    CHECK(is_watertight(mesh));
    CHECK(mesh_volume(mesh) == doctest::Approx(pattern_area_mm2(p, grid, 5.0) * 1.0).epsilon(1e-6));
}

TEST_CASE("mesh construction validates its inputs") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    CHECK_THROWS_AS(pattern_to_mesh({{}, grid.id()}, grid, 5.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pattern_to_mesh({{0}, grid.id()}, grid, 5.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pattern_to_mesh({{0}, grid.id()}, grid, -5.0, 1.0), std::invalid_argument);
}

TEST_CASE("subdivision respects the edge bound and preserves the solid") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const Pattern p{{0, 3, 7, 12, 13, 20, 25, 31}, grid.id()};
    const TriMesh mesh = pattern_to_mesh(p, grid, 5.0, 1.0);

    // Per-face bisection leaves T-junctions, so combinatorial closedness is
    // not promised; what must survive is the solid itself: children tile
    // their parents exactly, keeping volume and area.
    const TriMesh fine = subdivide(mesh, 0.5);
    CHECK(max_edge_length(fine) <= 0.5 + 1e-12);
    CHECK(fine.face_count() > mesh.face_count());
    CHECK(mesh_volume(fine) == doctest::Approx(mesh_volume(mesh)).epsilon(1e-9));
    CHECK(mesh_area(fine) == doctest::Approx(mesh_area(mesh)).epsilon(1e-9));

    // A mesh already within the bound passes through unchanged.
    const TriMesh same = subdivide(fine, 10.0);
    CHECK(same.faces == fine.faces);
    CHECK(same.vertices.size() == fine.vertices.size());

    CHECK_THROWS_AS(subdivide(mesh, 0.0), std::invalid_argument);
}

TEST_CASE("volume is signed by orientation and watertightness sees defects") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const TriMesh mesh = pattern_to_mesh({{5}, grid.id()}, grid, 5.0, 1.0);

    TriMesh flipped = mesh;
    for (auto& f : flipped.faces) std::swap(f[1], f[2]);
    CHECK(mesh_volume(flipped) == doctest::Approx(-mesh_volume(mesh)).epsilon(1e-12));
    CHECK(is_watertight(flipped));  // reversing every face keeps the mesh closed

    TriMesh holed = mesh;
    holed.faces.pop_back();
    CHECK_FALSE(is_watertight(holed));

    TriMesh empty;
    CHECK_FALSE(is_watertight(empty));
}

TEST_CASE("prisms touching at a single vertex stay closed") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    int a = -1, b = -1;
    for (size_t i = 0; i < grid.triangles.size() && a < 0; ++i)
        for (size_t j = i + 1; j < grid.triangles.size() && a < 0; ++j) {
            int shared = 0;
            for (int u : grid.triangles[i])
                for (int v : grid.triangles[j]) shared += (u == v) ? 1 : 0;
            if (shared == 1) {
                a = static_cast<int>(i);
                b = static_cast<int>(j);
            }
        }
    REQUIRE(a >= 0);

    // The pinch doubles a vertical edge in both directions; the surface is
    // still boundary-free and the enclosed volume is the sum of the prisms.
    const Pattern p{{a, b}, grid.id()};
    const TriMesh mesh = pattern_to_mesh(p, grid, 5.0, 1.0);
    CHECK(is_watertight(mesh));
    CHECK(mesh_volume(mesh) ==
          doctest::Approx(pattern_area_mm2(p, grid, 5.0) * 1.0).epsilon(1e-9));
}

TEST_CASE("surface vertices select the sensed face") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const Pattern p{{0, 3, 7}, grid.id()};
    const double depth = 1.0;
    const TriMesh mesh = pattern_to_mesh(p, grid, 5.0, depth);

    const PointCloud top = surface_vertices(mesh, depth);
    REQUIRE(top.size() > 0);
    for (const Vec3& v : top.points) CHECK(v.z == doctest::Approx(depth));
    CHECK(top.size() * 2 == static_cast<int>(mesh.vertices.size()));

    const PointCloud all = surface_vertices(mesh, depth, false);
    CHECK(all.size() == static_cast<int>(mesh.vertices.size()));
}

TEST_CASE("voxel downsampling averages within cells") {
    PointCloud cluster;
    cluster.points = {{0.02, 0.03, 0.01}, {0.08, 0.05, 0.02}, {0.05, 0.09, 0.03}};
    const PointCloud one = voxel_downsample(cluster, 1.0);
    REQUIRE(one.size() == 1);
    Vec3 mean{0, 0, 0};
    for (const Vec3& p : cluster.points) mean = mean + p;
    mean = (1.0 / 3.0) * mean;
    CHECK(one.points[0].x == doctest::Approx(mean.x).epsilon(1e-12));
    CHECK(one.points[0].y == doctest::Approx(mean.y).epsilon(1e-12));
    CHECK(one.points[0].z == doctest::Approx(mean.z).epsilon(1e-12));

    // Points in distinct cells pass through untouched.
    PointCloud sparse;
    for (int i = 0; i < 5; ++i) sparse.points.push_back({0.25 * i, 0.0, -0.25 * i});
    const PointCloud kept = voxel_downsample(sparse, 0.1);
    CHECK(sorted_points(kept) == sorted_points(sparse));
}

TEST_CASE("voxel downsampling is idempotent and local") {
    Rng rng(77);
    PointCloud cloud;
    for (int i = 0; i < 500; ++i)
        cloud.points.push_back(
            {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-0.5, 0.5)});

    const double v = 0.2;
    const PointCloud down = voxel_downsample(cloud, v);
    CHECK(down.size() <= cloud.size());
    CHECK(down.size() > 0);

    // Each centroid stays within half a cell diagonal of some input point.
    const double reach = std::sqrt(3.0) / 2.0 * v + 1e-9;
    for (const Vec3& c : down.points) {
        double nearest = 1e300;
        for (const Vec3& p : cloud.points) nearest = std::min(nearest, norm(p - c));
        CHECK(nearest <= reach);
    }

    const PointCloud again = voxel_downsample(down, v);
    REQUIRE(again.size() == down.size());
    for (int i = 0; i < down.size(); ++i) {
        CHECK(again.points[i].x == down.points[i].x);
        CHECK(again.points[i].y == down.points[i].y);
        CHECK(again.points[i].z == down.points[i].z);
    }

    CHECK(voxel_downsample({}, v).size() == 0);
    CHECK_THROWS_AS(voxel_downsample(cloud, 0.0), std::invalid_argument);
}
