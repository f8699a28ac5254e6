#ifndef TACTAG_HU_HPP
#define TACTAG_HU_HPP

#include <array>

#include "tactag/mask.hpp"

namespace tactag {

/// Seven log-transformed Hu moments, H_m = -sign(h_m) * log10(|h_m|).
/// A raw invariant of exactly zero is stored as 0.0 (the sentinel); genuine
/// log-transformed values of small invariants are large in magnitude, so the
/// sentinel does not collide with real data.
struct HuSignature {
    std::array<double, 7> h{};
};

// The seven raw Hu invariants from central normalized moments of the set
// pixels. Throws std::invalid_argument on an empty mask.
std::array<double, 7> hu_invariants(const Mask& mask);

HuSignature hu_signature(const Mask& mask);

struct HuDistanceInfo {
    int skipped_terms = 0;        // terms dropped because |H_{m,a}| < eps
    bool absolute_fallback = false;  // > 2 terms dropped: sum of |H_a - H_b| used
};

// d(a, b) = sum_m |H_{m,a} - H_{m,b}| / |H_{m,a}|. Asymmetric in its
// arguments by construction. Terms with |H_{m,a}| below eps are skipped and
// counted; when more than two are skipped the comparison falls back to plain
// absolute differences over all seven terms.
double hu_distance(const HuSignature& a, const HuSignature& b, HuDistanceInfo* info = nullptr);

// min(d(a,b), d(b,a)); the order-independent measure used for library admission.
double hu_distance_symmetric(const HuSignature& a, const HuSignature& b);

inline constexpr double kHuTermEps = 1e-8;

}  // namespace tactag

#endif
