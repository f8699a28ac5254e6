#include "tactag/hu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tactag {

std::array<double, 7> hu_invariants(const Mask& mask) {
    double n = 0.0, sx = 0.0, sy = 0.0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            n += 1.0;
            sx += x;
            sy += y;
        }
    }
    if (n == 0.0) throw std::invalid_argument("hu moments of an empty mask");
    const double cx = sx / n, cy = sy / n;

    // Central moments about the pixel centroid, up to order 3.
    double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            const double dx = x - cx, dy = y - cy;
            mu20 += dx * dx;
            mu02 += dy * dy;
            mu11 += dx * dy;
            mu30 += dx * dx * dx;
            mu03 += dy * dy * dy;
            mu21 += dx * dx * dy;
            mu12 += dx * dy * dy;
        }
    }

    const double s2 = n * n;           // mu00^(1 + (p+q)/2) for p+q = 2
    const double s3 = std::pow(n, 2.5);  // and for p+q = 3
    const double n20 = mu20 / s2, n02 = mu02 / s2, n11 = mu11 / s2;
    const double n30 = mu30 / s3, n03 = mu03 / s3, n21 = mu21 / s3, n12 = mu12 / s3;

    const double q30 = n30 + n12, q03 = n21 + n03;  // recurring sums
    std::array<double, 7> h{};
    h[0] = n20 + n02;
    h[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
    h[2] = (n30 - 3.0 * n12) * (n30 - 3.0 * n12) + (3.0 * n21 - n03) * (3.0 * n21 - n03);
    h[3] = q30 * q30 + q03 * q03;
    h[4] = (n30 - 3.0 * n12) * q30 * (q30 * q30 - 3.0 * q03 * q03) +
           (3.0 * n21 - n03) * q03 * (3.0 * q30 * q30 - q03 * q03);
    h[5] = (n20 - n02) * (q30 * q30 - q03 * q03) + 4.0 * n11 * q30 * q03;
    h[6] = (3.0 * n21 - n03) * q30 * (q30 * q30 - 3.0 * q03 * q03) -
           (n30 - 3.0 * n12) * q03 * (3.0 * q30 * q30 - q03 * q03);
    return h;
}

HuSignature hu_signature(const Mask& mask) {
    const auto inv = hu_invariants(mask);
    HuSignature sig;
    for (int m = 0; m < 7; ++m) {
        const double v = inv[m];
        sig.h[m] = v == 0.0 ? 0.0 : -(v > 0 ? 1.0 : -1.0) * std::log10(std::abs(v));
    }
    return sig;
}

double hu_distance(const HuSignature& a, const HuSignature& b, HuDistanceInfo* info) {
    double d = 0.0;
    int skipped = 0;
    for (int m = 0; m < 7; ++m) {
        const double denom = std::abs(a.h[m]);
        if (denom < kHuTermEps) {
            ++skipped;
            continue;
        }
        d += std::abs(a.h[m] - b.h[m]) / denom;
    }
    bool fallback = skipped > 2;
    if (fallback) {
        d = 0.0;
        for (int m = 0; m < 7; ++m) d += std::abs(a.h[m] - b.h[m]);
    }
    if (info) {
        info->skipped_terms = skipped;
        info->absolute_fallback = fallback;
    }
    return d;
}

double hu_distance_symmetric(const HuSignature& a, const HuSignature& b) {
    return std::min(hu_distance(a, b), hu_distance(b, a));
}

}  // namespace tactag
