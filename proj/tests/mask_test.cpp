#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <tactag/mask.hpp>
#include <tactag/pattern.hpp>
#include <tactag/rng.hpp>
#include <tactag/trigrid.hpp>

using namespace tactag;

namespace {

Mask random_mask(Rng& rng, int w, int h, double pitch, double fill) {
    Mask m = make_mask(w, h, pitch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.uniform01() < fill) m.set(x, y, true);
    return m;
}

bool is_subset(const Mask& inner, const Mask& outer) {
    for (size_t i = 0; i < inner.bits.size(); ++i)
        if (inner.bits[i] && !outer.bits[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("pixel centers sit in a centered physical frame") {
    const Mask m = make_mask(100, 100, 0.05);
    CHECK(m.width_mm() == doctest::Approx(5.0));
    CHECK(m.pixel_center(0, 0).x == doctest::Approx(-2.475).epsilon(1e-12));
    CHECK(m.pixel_center(0, 0).y == doctest::Approx(-2.475).epsilon(1e-12));
    CHECK(m.pixel_center(99, 99).x == doctest::Approx(2.475).epsilon(1e-12));
    CHECK(m.pixel_center(99, 99).y == doctest::Approx(2.475).epsilon(1e-12));
    // The frame center falls between the two middle pixels.
    CHECK(m.pixel_center(49, 49).x == doctest::Approx(-0.025).epsilon(1e-12));
    CHECK(m.pixel_center(50, 50).x == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("bounds and their center agree with the corner pixel centers") {
    Mask m = make_mask(64, 48, 0.1);
    CHECK(m.bounds().empty());
    CHECK(m.empty());
    CHECK_THROWS_AS(m.bounds_center_mm(), std::invalid_argument);

    m.set(10, 5, true);
    m.set(31, 20, true);
    m.set(12, 17, true);
    const Mask::Bounds b = m.bounds();
    CHECK(b.x0 == 10);
    CHECK(b.y0 == 5);
    CHECK(b.x1 == 31);
    CHECK(b.y1 == 20);

    const Vec2 lo = m.pixel_center(b.x0, b.y0);
    const Vec2 hi = m.pixel_center(b.x1, b.y1);
    const Vec2 c = m.bounds_center_mm();
    CHECK(c.x == doctest::Approx(0.5 * (lo.x + hi.x)).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(0.5 * (lo.y + hi.y)).epsilon(1e-12));
}

TEST_CASE("make_mask validates its arguments") {
    CHECK_THROWS_AS(make_mask(0, 10, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_mask(10, -1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_mask(10, 10, 0.0), std::invalid_argument);
}

TEST_CASE("rasterized area matches the analytic triangle area") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const double scale = 5.0, pitch = 0.05;

    const Pattern one{{0}, grid.id()};
    const auto v = grid.triangle_vertices(0);
    const double analytic = triangle_area(v[0], v[1], v[2]) * (scale / grid.extent) *
                            (scale / grid.extent);
    const Mask m = rasterize(one, grid, scale, pitch);
    CHECK(m.width == 100);
    CHECK(m.height == 100);
    CHECK(m.pitch_mm == pitch);
    const double raster = m.count() * pitch * pitch;
    CHECK(raster == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("the full triangle set rasterizes to a solid square") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    std::vector<int> all(grid.triangle_count());
    for (int i = 0; i < grid.triangle_count(); ++i) all[i] = i;
    const Mask m = rasterize({all, grid.id()}, grid, 5.0, 0.05);
    CHECK(m.count() == 100 * 100);
}

TEST_CASE("rasterize rejects empty patterns and coarse pitches") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    CHECK_THROWS_AS(rasterize({{}, grid.id()}, grid, 5.0, 0.05), std::invalid_argument);
    // 0.4 > 5/16
    CHECK_THROWS_AS(rasterize({{0}, grid.id()}, grid, 5.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(rasterize({{0}, grid.id()}, grid, -5.0, 0.05), std::invalid_argument);
}

TEST_CASE("halving the pitch refines the same shape") {
    const TriGrid grid = build_staggered_grid(4, 1.0);
    const Pattern p{{0, 3, 7, 12, 13, 20, 25, 31}, grid.id()};
    const Mask fine = rasterize(p, grid, 5.0, 0.05);
    const Mask coarse = rasterize(p, grid, 5.0, 0.1);

    // Upsample the coarse raster 2x2 onto the fine lattice.
    Mask up = make_mask(fine.width, fine.height, fine.pitch_mm);
    for (int y = 0; y < up.height; ++y)
        for (int x = 0; x < up.width; ++x)
            up.set(x, y, coarse.get(x / 2, y / 2));

    // Disagreement lives in the half-coarse-pixel band along the triangle
    // boundaries, which for this scattered pattern is roughly a tenth of the
    // area. A frame or scale error between the two rasters would cost far
    // more than that.
    CHECK(1.0 - iou_loss(fine, up) >= 0.85);
}

TEST_CASE("dilation grows a single pixel into a discrete disc") {
    Mask m = make_mask(9, 9, 0.1);
    m.set(4, 4, true);

    const Mask r1 = dilate(m, 1);
    CHECK(r1.count() == 5);
    CHECK(r1.get(4, 4));
    CHECK(r1.get(3, 4));
    CHECK(r1.get(5, 4));
    CHECK(r1.get(4, 3));
    CHECK(r1.get(4, 5));
    CHECK_FALSE(r1.get(3, 3));

    CHECK(dilate(m, 2).count() == 13);
    CHECK_THROWS_AS(dilate(m, 0), std::invalid_argument);
}

TEST_CASE("dilation matches disc stamping and never shrinks") {
    Rng rng(5);
    const Mask m = random_mask(rng, 20, 16, 0.1, 0.15);
    const int r = 2;
    const Mask d = dilate(m, r);

    // Oracle: a pixel is set iff some input pixel lies within radius r.
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool covered = false;
            for (int dy = -r; dy <= r && !covered; ++dy)
                for (int dx = -r; dx <= r && !covered; ++dx)
                    if (dx * dx + dy * dy <= r * r && m.in_bounds(x + dx, y + dy))
                        covered = m.get(x + dx, y + dy);
            CHECK(d.get(x, y) == covered);
        }
    }

    CHECK(is_subset(m, d));
    CHECK(is_subset(d, dilate(d, r)));
    CHECK(dilate(make_mask(8, 8, 0.1), 1).count() == 0);
}

TEST_CASE("iou loss matches hand-computed overlaps") {
    Mask a = make_mask(3, 1, 0.1);
    Mask b = make_mask(3, 1, 0.1);
    a.set(0, 0, true);
    a.set(1, 0, true);
    b.set(1, 0, true);
    b.set(2, 0, true);
    // Intersection 1, union 3.
    CHECK(iou_loss(a, b) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    CHECK(iou_loss(a, a) == 0.0);

    Mask disjoint = make_mask(3, 1, 0.1);
    disjoint.set(2, 0, true);
    CHECK(iou_loss(a, disjoint) == doctest::Approx(1.0));

    bool both_empty = false;
    const Mask e1 = make_mask(3, 1, 0.1), e2 = make_mask(3, 1, 0.1);
    CHECK(iou_loss(e1, e2, &both_empty) == 1.0);
    CHECK(both_empty);
    iou_loss(a, b, &both_empty);
    CHECK_FALSE(both_empty);
}

TEST_CASE("iou loss requires matching rasters") {
    const Mask a = make_mask(4, 4, 0.1);
    CHECK_THROWS_AS(iou_loss(a, make_mask(4, 5, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS(iou_loss(a, make_mask(4, 4, 0.2)), std::invalid_argument);
}

TEST_CASE("iou loss is symmetric and bounded") {
    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const Mask a = random_mask(rng, 12, 12, 0.1, 0.3);
        const Mask b = random_mask(rng, 12, 12, 0.1, 0.3);
        const double ab = iou_loss(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == iou_loss(b, a));
    }
}
