#ifndef TACTAG_IMPRINTSIM_HPP
#define TACTAG_IMPRINTSIM_HPP

#include <cstdint>
#include <vector>

#include "tactag/library.hpp"
#include "tactag/mask.hpp"
#include "tactag/mesh.hpp"
#include "tactag/registration.hpp"
#include "tactag/rng.hpp"

namespace tactag {

/// Simulated tactile sensing window. Stands in for the physical gel sensor:
/// the rendered mask is the contact geometry, the cloud its indentation
/// samples at depth_mm.
struct SensorSpec {
    double width_mm = 12.0;
    double height_mm = 12.0;
    double pitch_mm = 0.05;
    double depth_mm = 1.0;
    double depth_noise_sigma_mm = 0.02;
    double dropout_fraction = 0.05;  // [0, 1): pixels lost from mask and cloud together
};

struct Perturbation {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double theta_z_deg = 0.0;
};

struct PerturbationRanges {
    double x_mm = 2.5;      // +/- bound
    double y_mm = 2.5;
    double theta_deg = 3.0;
};

Perturbation sample_perturbation(Rng& rng, const PerturbationRanges& ranges = {});

struct InsertionSpec {
    double peg_side_mm = 30.2;
    double hole_side_mm = 31.6;
};

struct Imprint {
    Mask mask;
    PointCloud cloud;
    bool partial_capture = false;  // pattern extends past the sensor window
};

// Pattern geometry rotated about the pattern center, offset, and rasterized
// in the sensor frame. Cloud points are set-pixel centers at
// z = depth + N(0, sigma); dropout removes a pixel and its point together so
// mask and cloud stay consistent. Throws NumericError when the pattern falls
// fully outside the window.
Imprint render_imprint(const PatternLibrary& library, int entry_index, const Perturbation& pert,
                       const SensorSpec& sensor, Rng& rng);

// True iff every corner of the offset, rotated peg square lies inside the
// axis-aligned hole square.
bool insertion_success(const Perturbation& residual, const InsertionSpec& spec);

struct ClassificationTrial {
    int entry_index = -1;
    Perturbation pert;
    int predicted_index = -1;
    double loss = 1.0;
    double margin = 0.0;
    double elapsed_ms = 0.0;
    bool correct = false;
};

struct ClassificationEval {
    std::vector<ClassificationTrial> trials;
    int correct = 0;
    double mean_ms = 0.0;
};

// Renders trials_per_pattern imprints for k randomly chosen entries under
// random perturbations and classifies each against the full library.
ClassificationEval eval_classification(const PatternLibrary& library, int k,
                                       int trials_per_pattern, const PerturbationRanges& ranges,
                                       const SensorSpec& sensor, std::uint64_t seed);

struct RefinementRow {
    double offset_mm = 0.0;
    double y_ref_mm = 0.0;
    double abs_error_mm = 0.0;
    double percent_error = 0.0;
    double theta_z_deg = 0.0;
    bool converged = false;
};

struct RefinementEval {
    std::vector<RefinementRow> rows;
};

// Pure-Y offsets only; offset 0 is rejected (percent error undefined).
RefinementEval eval_refinement(const PatternLibrary& library, int entry_index,
                               const std::vector<double>& offsets_mm, const SensorSpec& sensor,
                               std::uint64_t seed);

struct InsertionTrial {
    Perturbation pert;
    double y_ref_mm = 0.0;
    double residual_y_mm = 0.0;
    bool success = false;
};

struct InsertionEval {
    std::vector<InsertionTrial> trials;
    double success_rate = 0.0;
};

// Monte Carlo insertion. The grasp model zeroes the X residual and reads
// theta_z off the gripper, so the scored residual is (0, y, 0) with
// y = pert.y - y_ref when refining, pert.y otherwise.
InsertionEval eval_insertion(const PatternLibrary& library, int entry_index,
                             const InsertionSpec& spec, int n_trials, bool with_refinement,
                             const PerturbationRanges& ranges, const SensorSpec& sensor,
                             std::uint64_t seed);

}  // namespace tactag

#endif
