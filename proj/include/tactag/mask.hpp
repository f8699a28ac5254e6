#ifndef TACTAG_MASK_HPP
#define TACTAG_MASK_HPP

#include <cstdint>
#include <vector>

#include "tactag/geometry.hpp"
#include "tactag/pattern.hpp"
#include "tactag/trigrid.hpp"

namespace tactag {

/// Binary raster with a physical pixel pitch. The physical frame is centered:
/// pixel (x, y) covers the square whose center is pixel_center(x, y), row 0
/// along the frame's lowest y. Every mask producer and consumer in the
/// pipeline shares this convention, so masks need no explicit origin.
struct Mask {
    int width = 0;
    int height = 0;
    double pitch_mm = 0.0;
    std::vector<std::uint8_t> bits;  // row-major, 0 or 1

    bool get(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    int count() const;
    bool empty() const { return count() == 0; }

    double width_mm() const { return width * pitch_mm; }
    double height_mm() const { return height * pitch_mm; }
    Vec2 pixel_center(int x, int y) const {
        return {(x + 0.5) * pitch_mm - 0.5 * width_mm(), (y + 0.5) * pitch_mm - 0.5 * height_mm()};
    }

    struct Bounds {
        int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive pixel bounds
        bool empty() const { return x1 < x0; }
    };
    Bounds bounds() const;

    // Center of the box bounding the set pixels, in frame mm. Throws
    // std::invalid_argument when empty.
    Vec2 bounds_center_mm() const;

    bool operator==(const Mask& o) const = default;
};

Mask make_mask(int width, int height, double pitch_mm);

// Pixel set iff its center lies inside a selected triangle scaled to scale_mm.
// The raster square spans [-scale_mm/2, scale_mm/2]^2. Requires
// pitch_mm <= scale_mm / 16 and a nonempty pattern.
Mask rasterize(const Pattern& pattern, const TriGrid& grid, double scale_mm, double pitch_mm);

// Morphological dilation with the discrete disc {(dx,dy): dx^2+dy^2 <= r^2}
// (elliptical element, circular in square pixels). Output is a superset of
// the input.
Mask dilate(const Mask& mask, int radius_px);

// 1 - |intersection| / |union|. Requires equal dimensions and pitch. Two
// empty masks give loss 1; the flag reports that case when requested.
double iou_loss(const Mask& a, const Mask& b, bool* both_empty = nullptr);

}  // namespace tactag

#endif
