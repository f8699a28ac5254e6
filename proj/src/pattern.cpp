#include "tactag/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tactag {

void validate_pattern(const Pattern& pattern, const TriGrid& grid) {
    if (!pattern.grid_id.empty() && pattern.grid_id != grid.id())
        throw std::invalid_argument("pattern grid id '" + pattern.grid_id +
                                    "' does not match grid '" + grid.id() + "'");
    int prev = -1;
    for (int id : pattern.triangle_ids) {
        if (id < 0 || id >= grid.triangle_count())
            throw std::invalid_argument("pattern triangle index out of range");
        if (id <= prev) throw std::invalid_argument("pattern triangle ids must be sorted unique");
        prev = id;
    }
}

int connectivity(const Pattern& pattern, const TriGrid& grid) {
    validate_pattern(pattern, grid);
    std::vector<char> selected(grid.triangle_count(), 0);
    for (int id : pattern.triangle_ids) selected[id] = 1;
    int connected = 0;
    for (int id : pattern.triangle_ids) {
        for (int nb : grid.adjacency[id]) {
            if (selected[nb]) {
                ++connected;
                break;
            }
        }
    }
    return connected;
}

namespace {

int connectivity_of(const std::vector<int>& ids, const std::vector<char>& selected,
                    const TriGrid& grid) {
    int connected = 0;
    for (int id : ids) {
        for (int nb : grid.adjacency[id]) {
            if (selected[nb]) {
                ++connected;
                break;
            }
        }
    }
    return connected;
}

}  // namespace

AnnealResult anneal_pattern(const TriGrid& grid, int n, int target_connectivity,
                            const AnnealSchedule& schedule, std::vector<int>* best_energy_trace) {
    const int total = grid.triangle_count();
    if (n < 1 || n > total) throw std::invalid_argument("pattern size n out of range for grid");
    if (target_connectivity < 0 || target_connectivity > n)
        throw std::invalid_argument("target connectivity must lie in [0, n]");
    if (!(schedule.t0 > 0.0) || !(schedule.beta > 0.0) || schedule.max_iters < 1)
        throw std::invalid_argument("anneal schedule requires t0 > 0, beta > 0, max_iters >= 1");

    Rng rng(schedule.seed);

    // Uniform initial n-subset (partial Fisher-Yates).
    std::vector<int> pool(total);
    for (int i = 0; i < total; ++i) pool[i] = i;
    for (int i = 0; i < n; ++i) {
        const int j = i + static_cast<int>(rng.below(total - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> current(pool.begin(), pool.begin() + n);
    std::vector<int> spare(pool.begin() + n, pool.end());
    std::vector<char> selected(total, 0);
    for (int id : current) selected[id] = 1;

    auto energy_of = [&](void) {
        return std::abs(connectivity_of(current, selected, grid) - target_connectivity);
    };

    int energy = energy_of();
    std::vector<int> best = current;
    int best_energy = energy;
    if (best_energy_trace) best_energy_trace->assign(1, best_energy);

    int iters = 0;
    for (int k = 0; k < schedule.max_iters && best_energy > 0; ++k) {
        iters = k + 1;
        const int si = spare.empty() ? -1 : static_cast<int>(rng.below(spare.size()));
        if (si < 0) break;  // n == total: no move exists
        const int ci = static_cast<int>(rng.below(current.size()));

        const int out = current[ci], in = spare[si];
        selected[out] = 0;
        selected[in] = 1;
        current[ci] = in;
        const int new_energy = energy_of();
        const int delta = new_energy - energy;

        bool accept = delta <= 0;
        if (!accept) {
            const double temp = schedule.t0 / (1.0 + schedule.beta * k);
            accept = rng.uniform01() < std::exp(-delta / temp);
        }
        if (accept) {
            spare[si] = out;
            energy = new_energy;
            if (energy < best_energy) {
                best_energy = energy;
                best = current;
            }
        } else {
            current[ci] = out;
            selected[in] = 0;
            selected[out] = 1;
        }
        if (best_energy_trace) best_energy_trace->push_back(best_energy);
    }

    AnnealResult result;
    std::sort(best.begin(), best.end());
    result.pattern.triangle_ids = std::move(best);
    result.pattern.grid_id = grid.id();
    result.best_energy = best_energy;
    result.reached_target = best_energy == 0;
    result.iterations = iters;
    return result;
}

std::pair<int, int> sample_generation_params(Rng& rng, const GenerationRange& range) {
    if (range.n_min < 1 || range.n_max < range.n_min)
        throw std::invalid_argument("pattern size range is empty");
    const int n = static_cast<int>(rng.uniform_int(range.n_min, range.n_max));
    const int lo = std::max(0, n - 2);
    const int target = static_cast<int>(rng.uniform_int(lo, n));
    return {n, target};
}

}  // namespace tactag
