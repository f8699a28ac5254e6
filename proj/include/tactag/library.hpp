#ifndef TACTAG_LIBRARY_HPP
#define TACTAG_LIBRARY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tactag/hu.hpp"
#include "tactag/mask.hpp"
#include "tactag/mesh.hpp"
#include "tactag/pattern.hpp"
#include "tactag/trigrid.hpp"

namespace tactag {

struct LibraryEntry {
    Pattern pattern;
    Mask mask;          // raw raster at library scale/pitch
    HuSignature hu;
    PointCloud cloud;   // registration source: voxelized top-surface samples
    std::string label;

    // Derived at build/load time, not persisted.
    Mask dilated_mask;
    Vec2 dilated_center_mm{};
};

struct LibraryConfig {
    int divisions = 4;
    double extent = 1.0;            // grid units
    int n_min = 10;
    int n_max = 20;
    double alpha = 0.1;             // dispersion threshold on symmetrized Hu distance
    double scale_mm = 5.0;          // physical pattern size
    double pitch_mm = 0.05;
    int dilate_radius_px = 2;
    double depth_mm = 1.0;
    double subdivide_max_edge = 0.1;  // grid units, scaled by scale_mm/extent for meshes
    double voxel_mm = 0.2;
    AnnealSchedule schedule;
    std::uint64_t seed = 0;
};

class PatternLibrary {
  public:
    LibraryConfig config;
    TriGrid grid;
    std::vector<LibraryEntry> entries;

    int size() const { return static_cast<int>(entries.size()); }
    int find(const std::string& label) const;  // -1 when absent

    // Minimum symmetrized Hu distance over all entry pairs; +inf for < 2 entries.
    double dispersion() const;
};

// Builds mask, signature and cloud for the candidate and appends it iff its
// symmetrized Hu distance to every entry exceeds config.alpha. Duplicate
// triangle sets are rejected regardless of distance. Label defaults to
// "p%04zu" of the new index when empty.
bool admit(PatternLibrary& library, const Pattern& candidate, const std::string& label = "");

// Derived per-entry data (dilated mask and its bounds center). Called by
// admit; needed after manual entry edits or deserialization.
void refresh_entry_cache(const PatternLibrary& library, LibraryEntry& entry);

struct ClassificationResult {
    int index = -1;
    std::string label;
    double loss = 1.0;
    double runner_up_margin = 0.0;  // second-best loss minus best loss
};

// Argmin of IoU loss against the dilated entry masks, after translating the
// imprint so its bounds center matches each entry's. Ties break toward the
// lowest entry index.
ClassificationResult classify(const Mask& imprint, const PatternLibrary& library);

// Samples (n, target), anneals, and admits until `count` entries exist.
// Throws NumericError if max_attempts candidates fail to fill the library.
// max_attempts <= 0 selects 200 * count.
PatternLibrary generate_library(const LibraryConfig& config, int count, int max_attempts = 0);

}  // namespace tactag

#endif
