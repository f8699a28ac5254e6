#include "tactag/mask.hpp"

#include <algorithm>
#include <stdexcept>

namespace tactag {

int Mask::count() const {
    int c = 0;
    for (auto b : bits) c += b != 0;
    return c;
}

Mask::Bounds Mask::bounds() const {
    Bounds b{width, height, -1, -1};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!get(x, y)) continue;
            b.x0 = std::min(b.x0, x);
            b.y0 = std::min(b.y0, y);
            b.x1 = std::max(b.x1, x);
            b.y1 = std::max(b.y1, y);
        }
    }
    return b;
}

Vec2 Mask::bounds_center_mm() const {
    const Bounds b = bounds();
    if (b.empty()) throw std::invalid_argument("bounds center of an empty mask");
    // Box over pixel areas: [x0, x1+1] x [y0, y1+1] in pixel units.
    return {(b.x0 + b.x1 + 1) * 0.5 * pitch_mm - 0.5 * width_mm(),
            (b.y0 + b.y1 + 1) * 0.5 * pitch_mm - 0.5 * height_mm()};
}

Mask make_mask(int width, int height, double pitch_mm) {
    if (width < 1 || height < 1 || !(pitch_mm > 0.0))
        throw std::invalid_argument("mask dimensions and pitch must be positive");
    Mask m;
    m.width = width;
    m.height = height;
    m.pitch_mm = pitch_mm;
    m.bits.assign(static_cast<size_t>(width) * height, 0);
    return m;
}

Mask rasterize(const Pattern& pattern, const TriGrid& grid, double scale_mm, double pitch_mm) {
    validate_pattern(pattern, grid);
    if (pattern.triangle_ids.empty()) throw std::invalid_argument("cannot rasterize an empty pattern");
    if (!(scale_mm > 0.0) || !(pitch_mm > 0.0))
        throw std::invalid_argument("scale and pitch must be positive");
    if (pitch_mm > scale_mm / 16.0)
        throw std::invalid_argument("raster pitch exceeds scale/16 resolution floor");

    const int px = static_cast<int>(std::lround(scale_mm / pitch_mm));
    Mask mask = make_mask(px, px, pitch_mm);

    const double s = scale_mm / grid.extent;
    const double half = 0.5 * scale_mm;
    for (int id : pattern.triangle_ids) {
        const auto v = grid.triangle_vertices(id);
        Vec2 a{v[0].x * s - half, v[0].y * s - half};
        Vec2 b{v[1].x * s - half, v[1].y * s - half};
        Vec2 c{v[2].x * s - half, v[2].y * s - half};
        const double xmin = std::min({a.x, b.x, c.x}), xmax = std::max({a.x, b.x, c.x});
        const double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
        const int x0 = std::max(0, static_cast<int>(std::floor((xmin + half) / pitch_mm - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor((ymin + half) / pitch_mm - 0.5)));
        const int x1 = std::min(px - 1, static_cast<int>(std::ceil((xmax + half) / pitch_mm)));
        const int y1 = std::min(px - 1, static_cast<int>(std::ceil((ymax + half) / pitch_mm)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (mask.get(x, y)) continue;
                if (point_in_triangle(mask.pixel_center(x, y), a, b, c)) mask.set(x, y, true);
            }
        }
    }
    if (mask.count() == 0) throw std::invalid_argument("pattern rasterized to zero area");
    return mask;
}

Mask dilate(const Mask& mask, int radius_px) {
    if (radius_px < 1) throw std::invalid_argument("dilation radius must be >= 1");
    std::vector<std::pair<int, int>> kernel;
    for (int dy = -radius_px; dy <= radius_px; ++dy)
        for (int dx = -radius_px; dx <= radius_px; ++dx)
            if (dx * dx + dy * dy <= radius_px * radius_px) kernel.emplace_back(dx, dy);

    Mask out = mask;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            for (const auto& [dx, dy] : kernel) {
                const int nx = x + dx, ny = y + dy;
                if (mask.in_bounds(nx, ny)) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

double iou_loss(const Mask& a, const Mask& b, bool* both_empty) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("iou_loss requires equal mask dimensions");
    if (a.pitch_mm != b.pitch_mm) throw std::invalid_argument("iou_loss requires equal mask pitch");
    long long inter = 0, uni = 0;
    for (size_t i = 0; i < a.bits.size(); ++i) {
        const bool sa = a.bits[i] != 0, sb = b.bits[i] != 0;
        inter += sa && sb;
        uni += sa || sb;
    }
    if (both_empty) *both_empty = uni == 0;
    if (uni == 0) return 1.0;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace tactag
