#include "tactag/trigrid.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

namespace tactag {
namespace {

// The staggered grid lives on an integer lattice in half-pitch units
// (x in [0, 2d], y = 2*row), which keeps every Delaunay predicate exact.
struct LatticePoint {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

using i128 = __int128;

int sign_of(i128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

int orient2d_sign(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
    const i128 d = i128(b.x - a.x) * i128(c.y - a.y) - i128(b.y - a.y) * i128(c.x - a.x);
    return sign_of(d);
}

// > 0 iff p is strictly inside the circumcircle of CCW triangle abc.
// Coordinates stay below 2^28 (divisions capped at 64), so the determinant
// fits __int128 with room to spare.
int incircle_sign(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c,
                  const LatticePoint& p) {
    const i128 adx = a.x - p.x, ady = a.y - p.y;
    const i128 bdx = b.x - p.x, bdy = b.y - p.y;
    const i128 cdx = c.x - p.x, cdy = c.y - p.y;
    const i128 ad2 = adx * adx + ady * ady;
    const i128 bd2 = bdx * bdx + bdy * bdy;
    const i128 cd2 = cdx * cdx + cdy * cdy;
    const i128 det = adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
                     ad2 * (bdx * cdy - cdx * bdy);
    return sign_of(det);
}

struct DelaunayTriangle {
    int a, b, c;
    bool alive = true;
};

// Bowyer-Watson with exact integer predicates. The super-triangle is placed
// far enough (32 * maxcoord^3) that no circumcircle of a finite Delaunay
// triangle can reach it, so dropping super-incident triangles leaves exactly
// the Delaunay triangulation of the input.
std::vector<std::array<int, 3>> delaunay_lattice(const std::vector<LatticePoint>& pts) {
    const int n = static_cast<int>(pts.size());
    std::int64_t maxc = 2;
    for (const auto& p : pts) maxc = std::max({maxc, p.x, p.y});
    const std::int64_t big = 32 * maxc * maxc * maxc;

    std::vector<LatticePoint> all = pts;
    all.push_back({-big, -big});
    all.push_back({3 * big, -big});
    all.push_back({-big, 3 * big});

    std::vector<DelaunayTriangle> tris;
    tris.push_back({n, n + 1, n + 2});

    std::vector<int> bad;
    std::map<std::pair<int, int>, int> edge_use;
    for (int i = 0; i < n; ++i) {
        bad.clear();
        edge_use.clear();
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) continue;
            if (incircle_sign(all[tris[t].a], all[tris[t].b], all[tris[t].c], all[i]) > 0)
                bad.push_back(t);
        }
        for (int t : bad) {
            const int v[3] = {tris[t].a, tris[t].b, tris[t].c};
            for (int e = 0; e < 3; ++e) edge_use[{v[e], v[(e + 1) % 3]}]++;
            tris[t].alive = false;
        }
        for (int t : bad) {
            const int v[3] = {tris[t].a, tris[t].b, tris[t].c};
            for (int e = 0; e < 3; ++e) {
                const int u = v[e], w = v[(e + 1) % 3];
                if (edge_use.count({w, u}) == 0) tris.push_back({u, w, i});
            }
        }
    }

    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris) {
        if (!t.alive || t.a >= n || t.b >= n || t.c >= n) continue;
        std::array<int, 3> tri = {t.a, t.b, t.c};
        if (orient2d_sign(all[tri[0]], all[tri[1]], all[tri[2]]) < 0) std::swap(tri[1], tri[2]);
        // Canonical rotation: smallest vertex first, orientation preserved.
        while (tri[0] != std::min({tri[0], tri[1], tri[2]})) {
            std::array<int, 3> r = {tri[1], tri[2], tri[0]};
            tri = r;
        }
        out.push_back(tri);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LatticePoint> staggered_lattice(int divisions) {
    std::vector<LatticePoint> pts;
    for (int r = 0; r <= divisions; ++r) {
        const bool offset = (r % 2 == 1) && r != 0 && r != divisions;
        if (offset) {
            for (int c = 0; c < divisions; ++c) pts.push_back({2 * c + 1, 2 * r});
        } else {
            for (int c = 0; c <= divisions; ++c) pts.push_back({2 * c, 2 * r});
        }
    }
    return pts;
}

}  // namespace

std::string TriGrid::id() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "stag%d@%.6g", divisions, extent);
    return buf;
}

std::vector<Vec2> staggered_points(int divisions, double extent) {
    if (divisions < 2) throw std::invalid_argument("staggered grid requires divisions >= 2");
    if (divisions > 64) throw std::invalid_argument("staggered grid capped at divisions <= 64");
    if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
    const double unit = extent / (2.0 * divisions);
    std::vector<Vec2> pts;
    for (const auto& p : staggered_lattice(divisions))
        pts.push_back({p.x * unit, p.y * unit});
    return pts;
}

TriGrid build_staggered_grid(int divisions, double extent) {
    TriGrid grid;
    grid.points = staggered_points(divisions, extent);  // validates arguments
    grid.extent = extent;
    grid.divisions = divisions;
    grid.triangles = delaunay_lattice(staggered_lattice(divisions));

    std::map<std::pair<int, int>, std::vector<int>> edges;
    for (int t = 0; t < grid.triangle_count(); ++t) {
        const auto& tri = grid.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int u = tri[e], w = tri[(e + 1) % 3];
            edges[{std::min(u, w), std::max(u, w)}].push_back(t);
        }
    }
    grid.adjacency.assign(grid.triangle_count(), {});
    for (const auto& [edge, owners] : edges) {
        if (owners.size() > 2)
            throw std::logic_error("triangulation edge shared by more than two triangles");
        if (owners.size() == 2) {
            grid.adjacency[owners[0]].push_back(owners[1]);
            grid.adjacency[owners[1]].push_back(owners[0]);
        }
    }
    for (auto& adj : grid.adjacency) std::sort(adj.begin(), adj.end());
    return grid;
}

}  // namespace tactag
