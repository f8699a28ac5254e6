#include "tactag/library.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "tactag/error.hpp"
#include "tactag/rng.hpp"

namespace tactag {

int PatternLibrary::find(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (entries[i].label == label) return i;
    return -1;
}

double PatternLibrary::dispersion() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < entries.size(); ++i)
        for (size_t j = i + 1; j < entries.size(); ++j)
            best = std::min(best, hu_distance_symmetric(entries[i].hu, entries[j].hu));
    return best;
}

void refresh_entry_cache(const PatternLibrary& library, LibraryEntry& entry) {
    entry.dilated_mask = dilate(entry.mask, library.config.dilate_radius_px);
    entry.dilated_center_mm = entry.dilated_mask.bounds_center_mm();
}

namespace {

PointCloud build_entry_cloud(const Pattern& pattern, const PatternLibrary& library) {
    const LibraryConfig& c = library.config;
    TriMesh mesh = pattern_to_mesh(pattern, library.grid, c.scale_mm, c.depth_mm);
    // Vertices must saturate every voxel, otherwise each cell keeps a single
    // bisection vertex and the cloud inherits the subdivision structure,
    // which biases registration. Half the voxel size guarantees several
    // vertices per occupied cell so the centroids track the surface.
    const double mesh_edge_mm = c.subdivide_max_edge * (c.scale_mm / library.grid.extent);
    mesh = subdivide(mesh, std::min(mesh_edge_mm, 0.5 * c.voxel_mm));
    return voxel_downsample(surface_vertices(mesh, c.depth_mm), c.voxel_mm);
}

}  // namespace

bool admit(PatternLibrary& library, const Pattern& candidate, const std::string& label) {
    validate_pattern(candidate, library.grid);
    if (candidate.triangle_ids.empty()) throw std::invalid_argument("empty pattern");
    if (!label.empty() && library.find(label) >= 0)
        throw std::invalid_argument("duplicate label: " + label);
    for (const LibraryEntry& e : library.entries)
        if (e.pattern.triangle_ids == candidate.triangle_ids) return false;

    LibraryEntry entry;
    entry.pattern = candidate;
    entry.mask = rasterize(candidate, library.grid, library.config.scale_mm,
                           library.config.pitch_mm);
    entry.hu = hu_signature(entry.mask);
    for (const LibraryEntry& e : library.entries)
        if (hu_distance_symmetric(entry.hu, e.hu) <= library.config.alpha) return false;

    entry.cloud = build_entry_cloud(candidate, library);
    if (label.empty()) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "p%04zu", library.entries.size());
        entry.label = buf;
    } else {
        entry.label = label;
    }
    refresh_entry_cache(library, entry);
    library.entries.push_back(std::move(entry));
    return true;
}

ClassificationResult classify(const Mask& imprint, const PatternLibrary& library) {
    if (library.entries.empty()) throw std::invalid_argument("empty library");
    if (imprint.empty()) throw std::invalid_argument("empty imprint");

    const Mask::Bounds ib = imprint.bounds();
    const double icx = (ib.x0 + ib.x1 + 1) / 2.0;
    const double icy = (ib.y0 + ib.y1 + 1) / 2.0;
    const int icount = imprint.count();

    ClassificationResult best;
    double second = std::numeric_limits<double>::infinity();
    double best_loss = std::numeric_limits<double>::infinity();
    for (int i = 0; i < library.size(); ++i) {
        const Mask& m = library.entries[i].dilated_mask;
        if (std::abs(m.pitch_mm - imprint.pitch_mm) > 1e-9)
            throw DataError("imprint pixel pitch does not match the library");
        const Mask::Bounds eb = m.bounds();
        const int sx = static_cast<int>(std::lround((eb.x0 + eb.x1 + 1) / 2.0 - icx));
        const int sy = static_cast<int>(std::lround((eb.y0 + eb.y1 + 1) / 2.0 - icy));

        int inter = 0;
        for (int y = ib.y0; y <= ib.y1; ++y)
            for (int x = ib.x0; x <= ib.x1; ++x)
                if (imprint.get(x, y) && m.in_bounds(x + sx, y + sy) && m.get(x + sx, y + sy))
                    ++inter;
        const int uni = icount + m.count() - inter;
        const double loss = 1.0 - static_cast<double>(inter) / uni;
        if (loss < best_loss) {
            second = best_loss;
            best_loss = loss;
            best.index = i;
        } else if (loss < second) {
            second = loss;
        }
    }
    best.loss = best_loss;
    best.label = library.entries[best.index].label;
    best.runner_up_margin = library.size() > 1 ? second - best_loss : 0.0;
    return best;
}

PatternLibrary generate_library(const LibraryConfig& config, int count, int max_attempts) {
    if (count < 1) throw std::invalid_argument("count must be positive");
    if (config.n_min < 1 || config.n_max < config.n_min)
        throw std::invalid_argument("invalid pattern size range");
    if (config.alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    if (max_attempts <= 0) max_attempts = 200 * count;

    PatternLibrary library;
    library.config = config;
    library.grid = build_staggered_grid(config.divisions, config.extent);
    if (config.n_max > library.grid.triangle_count())
        throw std::invalid_argument("n_max exceeds the grid triangle count");

    Rng rng(config.seed);
    const GenerationRange range{config.n_min, config.n_max};
    int attempts = 0;
    while (library.size() < count && attempts < max_attempts) {
        ++attempts;
        const auto [n, target] = sample_generation_params(rng, range);
        AnnealSchedule schedule = config.schedule;
        schedule.seed = derive_seed(config.seed, static_cast<std::uint64_t>(attempts));
        const AnnealResult result = anneal_pattern(library.grid, n, target, schedule);
        admit(library, result.pattern);
    }
    if (library.size() < count) {
        throw NumericError("library generation stalled: " + std::to_string(library.size()) +
                           " of " + std::to_string(count) + " patterns after " +
                           std::to_string(attempts) + " attempts");
    }
    return library;
}

}  // namespace tactag
