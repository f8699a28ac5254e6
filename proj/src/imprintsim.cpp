#include "tactag/imprintsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tactag/error.hpp"
#include "tactag/transform2d.hpp"

namespace tactag {

Perturbation sample_perturbation(Rng& rng, const PerturbationRanges& ranges) {
    if (ranges.x_mm < 0.0 || ranges.y_mm < 0.0 || ranges.theta_deg < 0.0)
        throw std::invalid_argument("perturbation ranges must be non-negative");
    return {rng.uniform(-ranges.x_mm, ranges.x_mm), rng.uniform(-ranges.y_mm, ranges.y_mm),
            rng.uniform(-ranges.theta_deg, ranges.theta_deg)};
}

Imprint render_imprint(const PatternLibrary& library, int entry_index, const Perturbation& pert,
                       const SensorSpec& sensor, Rng& rng) {
    if (entry_index < 0 || entry_index >= library.size())
        throw std::invalid_argument("entry index out of range");
    if (sensor.width_mm <= 0.0 || sensor.height_mm <= 0.0 || sensor.pitch_mm <= 0.0 ||
        sensor.depth_mm <= 0.0 || sensor.depth_noise_sigma_mm < 0.0 ||
        sensor.dropout_fraction < 0.0 || sensor.dropout_fraction >= 1.0)
        throw std::invalid_argument("invalid sensor spec");

    const LibraryEntry& entry = library.entries[entry_index];
    const TriGrid& grid = library.grid;
    const double s = library.config.scale_mm / grid.extent;
    const double half = library.config.scale_mm / 2.0;
    const RigidTransform2D pose{pert.x_mm, pert.y_mm, pert.theta_z_deg};

    const int wpx = static_cast<int>(std::lround(sensor.width_mm / sensor.pitch_mm));
    const int hpx = static_cast<int>(std::lround(sensor.height_mm / sensor.pitch_mm));
    Imprint imprint;
    imprint.mask = make_mask(wpx, hpx, sensor.pitch_mm);
    Mask& mask = imprint.mask;

    const double hw = wpx * sensor.pitch_mm / 2.0, hh = hpx * sensor.pitch_mm / 2.0;
    for (int t : entry.pattern.triangle_ids) {
        std::array<Vec2, 3> v = grid.triangle_vertices(t);
        for (Vec2& p : v) p = pose.apply(Vec2{p.x * s - half, p.y * s - half});
        for (Vec2 p : v)
            if (p.x < -hw || p.x > hw || p.y < -hh || p.y > hh) imprint.partial_capture = true;

        double minx = v[0].x, maxx = v[0].x, miny = v[0].y, maxy = v[0].y;
        for (Vec2 p : v) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        // Pixel x covers centers (x + 0.5) * pitch - hw.
        const int x0 = std::max(0, static_cast<int>(std::floor((minx + hw) / sensor.pitch_mm - 0.5)));
        const int x1 = std::min(wpx - 1, static_cast<int>(std::ceil((maxx + hw) / sensor.pitch_mm - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor((miny + hh) / sensor.pitch_mm - 0.5)));
        const int y1 = std::min(hpx - 1, static_cast<int>(std::ceil((maxy + hh) / sensor.pitch_mm - 0.5)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (mask.get(x, y)) continue;
                if (point_in_triangle(mask.pixel_center(x, y), v[0], v[1], v[2]))
                    mask.set(x, y, true);
            }
        }
    }
    if (mask.empty()) throw NumericError("pattern fell outside the sensor window");

    // Dropout removes a pixel and its cloud point together; kept pixels get
    // one depth sample each, so mask count always equals cloud size.
    for (int y = 0; y < hpx; ++y) {
        for (int x = 0; x < wpx; ++x) {
            if (!mask.get(x, y)) continue;
            if (sensor.dropout_fraction > 0.0 && rng.uniform01() < sensor.dropout_fraction) {
                mask.set(x, y, false);
                continue;
            }
            const Vec2 c = mask.pixel_center(x, y);
            imprint.cloud.points.push_back(
                {c.x, c.y, sensor.depth_mm + rng.normal(0.0, sensor.depth_noise_sigma_mm)});
        }
    }
    if (mask.empty()) throw NumericError("dropout removed the whole imprint");
    return imprint;
}

bool insertion_success(const Perturbation& residual, const InsertionSpec& spec) {
    if (spec.peg_side_mm <= 0.0 || spec.hole_side_mm <= spec.peg_side_mm)
        throw std::invalid_argument("hole side must exceed peg side");
    const double hp = spec.peg_side_mm / 2.0, hh = spec.hole_side_mm / 2.0;
    const RigidTransform2D pose{residual.x_mm, residual.y_mm, residual.theta_z_deg};
    for (double cx : {-hp, hp}) {
        for (double cy : {-hp, hp}) {
            const Vec2 p = pose.apply(Vec2{cx, cy});
            if (std::abs(p.x) > hh || std::abs(p.y) > hh) return false;
        }
    }
    return true;
}

ClassificationEval eval_classification(const PatternLibrary& library, int k,
                                       int trials_per_pattern, const PerturbationRanges& ranges,
                                       const SensorSpec& sensor, std::uint64_t seed) {
    if (library.size() == 0) throw std::invalid_argument("empty library");
    if (k < 1 || k > library.size()) throw std::invalid_argument("k out of range");
    if (trials_per_pattern < 1) throw std::invalid_argument("trials_per_pattern must be positive");

    Rng picker(derive_seed(seed, 0));
    std::vector<int> indices(library.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (int i = 0; i < k; ++i)
        std::swap(indices[i], indices[i + picker.below(indices.size() - i)]);
    indices.resize(k);

    ClassificationEval eval;
    std::uint64_t stream = 1;
    for (int entry_index : indices) {
        for (int t = 0; t < trials_per_pattern; ++t, ++stream) {
            Rng rng(derive_seed(seed, stream));
            ClassificationTrial trial;
            trial.entry_index = entry_index;
            trial.pert = sample_perturbation(rng, ranges);
            const Imprint imprint = render_imprint(library, entry_index, trial.pert, sensor, rng);
            const auto t0 = std::chrono::steady_clock::now();
            const ClassificationResult r = classify(imprint.mask, library);
            const auto t1 = std::chrono::steady_clock::now();
            trial.predicted_index = r.index;
            trial.loss = r.loss;
            trial.margin = r.runner_up_margin;
            trial.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            trial.correct = r.index == entry_index;
            eval.correct += trial.correct ? 1 : 0;
            eval.mean_ms += trial.elapsed_ms;
            eval.trials.push_back(trial);
        }
    }
    eval.mean_ms /= eval.trials.size();
    return eval;
}

RefinementEval eval_refinement(const PatternLibrary& library, int entry_index,
                               const std::vector<double>& offsets_mm, const SensorSpec& sensor,
                               std::uint64_t seed) {
    if (entry_index < 0 || entry_index >= library.size())
        throw std::invalid_argument("entry index out of range");
    if (offsets_mm.empty()) throw std::invalid_argument("no offsets given");
    for (double o : offsets_mm)
        if (o == 0.0) throw std::invalid_argument("offset 0 has undefined percent error");

    RefinementEval eval;
    const LibraryEntry& entry = library.entries[entry_index];
    std::uint64_t stream = 0;
    for (double offset : offsets_mm) {
        Rng rng(derive_seed(seed, ++stream));
        const Perturbation pert{0.0, offset, 0.0};
        const Imprint imprint = render_imprint(library, entry_index, pert, sensor, rng);
        const RefinementResult r = refine_pose(imprint.cloud, imprint.mask, entry);
        RefinementRow row;
        row.offset_mm = offset;
        row.y_ref_mm = r.y_ref;
        row.abs_error_mm = std::abs(r.y_ref - offset);
        row.percent_error = 100.0 * row.abs_error_mm / std::abs(offset);
        row.theta_z_deg = r.theta_z_deg;
        row.converged = r.converged;
        eval.rows.push_back(row);
    }
    return eval;
}

InsertionEval eval_insertion(const PatternLibrary& library, int entry_index,
                             const InsertionSpec& spec, int n_trials, bool with_refinement,
                             const PerturbationRanges& ranges, const SensorSpec& sensor,
                             std::uint64_t seed) {
    if (entry_index < 0 || entry_index >= library.size())
        throw std::invalid_argument("entry index out of range");
    if (n_trials < 1) throw std::invalid_argument("n_trials must be positive");

    InsertionEval eval;
    const LibraryEntry& entry = library.entries[entry_index];
    for (int i = 0; i < n_trials; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
        InsertionTrial trial;
        trial.pert = sample_perturbation(rng, ranges);
        double residual_y = trial.pert.y_mm;
        if (with_refinement) {
            const Imprint imprint =
                render_imprint(library, entry_index, trial.pert, sensor, rng);
            const RefinementResult r = refine_pose(imprint.cloud, imprint.mask, entry);
            trial.y_ref_mm = r.y_ref;
            residual_y = trial.pert.y_mm - r.y_ref;
        }
        // The grasp squares the part against the gripper jaw, so no X error
        // survives, and theta_z is read off the wrist encoder.
        trial.residual_y_mm = residual_y;
        trial.success = insertion_success({0.0, residual_y, 0.0}, spec);
        eval.trials.push_back(trial);
    }
    for (const InsertionTrial& t : eval.trials) eval.success_rate += t.success ? 1.0 : 0.0;
    eval.success_rate /= n_trials;
    return eval;
}

}  // namespace tactag
