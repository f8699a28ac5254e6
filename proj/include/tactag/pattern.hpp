#ifndef TACTAG_PATTERN_HPP
#define TACTAG_PATTERN_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tactag/rng.hpp"
#include "tactag/trigrid.hpp"

namespace tactag {

/// A selected subset of grid triangles. One pattern = one part label.
struct Pattern {
    std::vector<int> triangle_ids;  // sorted, unique, valid for the grid
    std::string grid_id;

    int n() const { return static_cast<int>(triangle_ids.size()); }
    bool operator==(const Pattern& o) const {
        return triangle_ids == o.triangle_ids && grid_id == o.grid_id;
    }
};

// Throws std::invalid_argument if ids are unsorted, duplicated, out of range,
// or the grid id does not match.
void validate_pattern(const Pattern& pattern, const TriGrid& grid);

// Count of selected triangles with at least one selected edge-neighbor.
int connectivity(const Pattern& pattern, const TriGrid& grid);

/// Linear multiplicative cooling: T_k = t0 / (1 + beta * k).
struct AnnealSchedule {
    double t0 = 1.0;
    double beta = 0.01;
    int max_iters = 5000;
    std::uint64_t seed = 0;
};

struct AnnealResult {
    Pattern pattern;
    int best_energy = 0;       // |connectivity - target| of the returned pattern
    bool reached_target = false;
    int iterations = 0;        // iterations actually run
};

// Minimizes |connectivity - target| by swapping one selected triangle for one
// unselected triangle per step. Stops early at energy 0. If best_energy_trace
// is given it records the best-so-far energy after every iteration.
AnnealResult anneal_pattern(const TriGrid& grid, int n, int target_connectivity,
                            const AnnealSchedule& schedule,
                            std::vector<int>* best_energy_trace = nullptr);

struct GenerationRange {
    int n_min = 10;
    int n_max = 20;
};

// n uniform in [n_min, n_max]; target uniform in [max(0, n-2), n].
std::pair<int, int> sample_generation_params(Rng& rng, const GenerationRange& range = {});

}  // namespace tactag

#endif
