#include "tactag/tactag.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactag/error.hpp"
#include "tactag/imprintsim.hpp"
#include "tactag/io.hpp"
#include "tactag/library.hpp"
#include "tactag/registration.hpp"

using nlohmann::json;

struct tactag_library {
    tactag::PatternLibrary impl;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
tactag_status guarded(F&& body) {
    try {
        body();
        return TACTAG_OK;
    } catch (const tactag::IoError& e) {
        g_last_error = e.what();
        return TACTAG_IO_ERROR;
    } catch (const tactag::DataError& e) {
        g_last_error = e.what();
        return TACTAG_DATA_ERROR;
    } catch (const tactag::NumericError& e) {
        g_last_error = e.what();
        return TACTAG_NUMERIC_ERROR;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return TACTAG_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TACTAG_NUMERIC_ERROR;
    }
}

tactag_status fail_invalid(const char* msg) {
    g_last_error = msg;
    return TACTAG_INVALID_ARGUMENT;
}

tactag::SensorSpec to_spec(const tactag_sensor* s) {
    if (!s) return {};
    return {s->width_mm, s->height_mm, s->pitch_mm, s->depth_mm, s->depth_noise_sigma_mm,
            s->dropout_fraction};
}

tactag::RegistrationParams to_params(const tactag_refine_params* p) {
    if (!p) return {};
    return {p->max_iterations,  p->convergence_tol_mm, p->sigma0_mm, p->sigma_decay,
            p->sigma_floor_mm,  p->outlier_weight,     p->use_icp != 0};
}

void fill_classification(const tactag::ClassificationResult& r, double elapsed_ms,
                         tactag_classification* out) {
    out->index = r.index;
    std::snprintf(out->label, sizeof out->label, "%s", r.label.c_str());
    out->loss = r.loss;
    out->runner_up_margin = r.runner_up_margin;
    out->elapsed_ms = elapsed_ms;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require_entry(const tactag_library* lib, const char* label) {
    const int index = lib->impl.find(label);
    if (index < 0) throw std::invalid_argument("unknown label: " + std::string(label));
    return index;
}

}  // namespace

extern "C" {

const char* tactag_last_error(void) { return g_last_error.c_str(); }

void tactag_generate_params_init(tactag_generate_params* p) {
    if (!p) return;
    const tactag::LibraryConfig c;
    *p = {1095,        c.divisions,        c.extent,   c.n_min,
          c.n_max,     c.alpha,            c.scale_mm, c.pitch_mm,
          c.dilate_radius_px, c.depth_mm,  c.subdivide_max_edge, c.voxel_mm,
          c.schedule.t0, c.schedule.beta,  c.schedule.max_iters, c.seed,
          0};
}

tactag_status tactag_library_generate(const tactag_generate_params* p, tactag_library** out) {
    if (!p || !out) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        tactag::LibraryConfig c;
        c.divisions = p->divisions;
        c.extent = p->extent;
        c.n_min = p->n_min;
        c.n_max = p->n_max;
        c.alpha = p->alpha;
        c.scale_mm = p->scale_mm;
        c.pitch_mm = p->pitch_mm;
        c.dilate_radius_px = p->dilate_radius_px;
        c.depth_mm = p->depth_mm;
        c.subdivide_max_edge = p->subdivide_max_edge;
        c.voxel_mm = p->voxel_mm;
        c.schedule.t0 = p->anneal_t0;
        c.schedule.beta = p->anneal_beta;
        c.schedule.max_iters = p->anneal_max_iters;
        c.seed = p->seed;
        *out = new tactag_library{tactag::generate_library(c, p->count, p->max_attempts)};
    });
}

tactag_status tactag_library_save(const tactag_library* lib, const char* dir) {
    if (!lib || !dir) return fail_invalid("null argument");
    return guarded([&] { tactag::save_library(lib->impl, dir); });
}

tactag_status tactag_library_load(const char* dir, int strict, tactag_library** out) {
    if (!dir || !out) return fail_invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new tactag_library{tactag::load_library(dir, strict != 0)}; });
}

void tactag_library_free(tactag_library* lib) { delete lib; }

int tactag_library_size(const tactag_library* lib) { return lib ? lib->impl.size() : 0; }

const char* tactag_library_label(const tactag_library* lib, int index) {
    if (!lib || index < 0 || index >= lib->impl.size()) return nullptr;
    return lib->impl.entries[index].label.c_str();
}

int tactag_library_find(const tactag_library* lib, const char* label) {
    if (!lib || !label) return -1;
    return lib->impl.find(label);
}

tactag_status tactag_library_dispersion(const tactag_library* lib, double* out) {
    if (!lib || !out) return fail_invalid("null argument");
    return guarded([&] { *out = lib->impl.dispersion(); });
}

tactag_status tactag_export_entry(const tactag_library* lib, const char* label,
                                  const char* stl_path, const char* ply_path) {
    if (!lib || !label) return fail_invalid("null argument");
    return guarded([&] {
        const int index = require_entry(lib, label);
        const tactag::LibraryEntry& e = lib->impl.entries[index];
        if (stl_path) {
            tactag::write_stl(tactag::pattern_to_mesh(e.pattern, lib->impl.grid,
                                                      lib->impl.config.scale_mm,
                                                      lib->impl.config.depth_mm),
                              stl_path);
        }
        if (ply_path) tactag::write_ply(e.cloud, ply_path);
    });
}

tactag_status tactag_classify_file(const tactag_library* lib, const char* mask_path,
                                   double pitch_mm, tactag_classification* out) {
    if (!lib || !mask_path || !out) return fail_invalid("null argument");
    return guarded([&] {
        const double fallback = pitch_mm > 0.0 ? pitch_mm : lib->impl.config.pitch_mm;
        const tactag::Mask mask = tactag::read_mask(mask_path, fallback);
        const auto t0 = std::chrono::steady_clock::now();
        const tactag::ClassificationResult r = tactag::classify(mask, lib->impl);
        const auto t1 = std::chrono::steady_clock::now();
        fill_classification(r, std::chrono::duration<double, std::milli>(t1 - t0).count(), out);
    });
}

tactag_status tactag_classify_mask(const tactag_library* lib, int width, int height,
                                   double pitch_mm, const uint8_t* bits,
                                   tactag_classification* out) {
    if (!lib || !bits || !out) return fail_invalid("null argument");
    if (width < 1 || height < 1 || pitch_mm <= 0.0) return fail_invalid("bad mask shape");
    return guarded([&] {
        tactag::Mask mask = tactag::make_mask(width, height, pitch_mm);
        for (size_t i = 0; i < mask.bits.size(); ++i) mask.bits[i] = bits[i] ? 1 : 0;
        const auto t0 = std::chrono::steady_clock::now();
        const tactag::ClassificationResult r = tactag::classify(mask, lib->impl);
        const auto t1 = std::chrono::steady_clock::now();
        fill_classification(r, std::chrono::duration<double, std::milli>(t1 - t0).count(), out);
    });
}

void tactag_refine_params_init(tactag_refine_params* p) {
    if (!p) return;
    const tactag::RegistrationParams d;
    *p = {d.max_iterations, d.convergence_tol_mm, d.sigma0_mm, d.sigma_decay,
          d.sigma_floor_mm, d.outlier_weight,     d.use_icp ? 1 : 0};
}

tactag_status tactag_refine_files(const tactag_library* lib, const char* label,
                                  const char* cloud_ply_path, const char* mask_path,
                                  double pitch_mm, const tactag_refine_params* params,
                                  tactag_refinement* out) {
    if (!lib || !label || !cloud_ply_path || !mask_path || !out)
        return fail_invalid("null argument");
    return guarded([&] {
        const int index = require_entry(lib, label);
        const double fallback = pitch_mm > 0.0 ? pitch_mm : lib->impl.config.pitch_mm;
        const tactag::PointCloud cloud = tactag::read_ply(cloud_ply_path);
        const tactag::Mask mask = tactag::read_mask(mask_path, fallback);
        const tactag::RefinementResult r =
            tactag::refine_pose(cloud, mask, lib->impl.entries[index], to_params(params));
        *out = {r.transform.tx, r.transform.ty, r.transform.theta_z_deg,
                r.y_ref,        r.residual_rmse_mm, r.converged ? 1 : 0};
    });
}

void tactag_sensor_init(tactag_sensor* s) {
    if (!s) return;
    const tactag::SensorSpec d;
    *s = {d.width_mm, d.height_mm, d.pitch_mm, d.depth_mm, d.depth_noise_sigma_mm,
          d.dropout_fraction};
}

tactag_status tactag_simulate(const tactag_library* lib, const char* label, double x_mm,
                              double y_mm, double theta_z_deg, const tactag_sensor* sensor,
                              uint64_t seed, const char* mask_out_path,
                              const char* cloud_out_path) {
    if (!lib || !label) return fail_invalid("null argument");
    return guarded([&] {
        const int index = require_entry(lib, label);
        tactag::Rng rng(seed);
        const tactag::Imprint imprint = tactag::render_imprint(
            lib->impl, index, {x_mm, y_mm, theta_z_deg}, to_spec(sensor), rng);
        if (mask_out_path) tactag::write_pgm(imprint.mask, mask_out_path);
        if (cloud_out_path) tactag::write_ply(imprint.cloud, cloud_out_path);
    });
}

void tactag_string_free(char* s) { std::free(s); }

tactag_status tactag_eval_classification(const tactag_library* lib, int k,
                                         int trials_per_pattern, const tactag_sensor* sensor,
                                         uint64_t seed, int* correct, int* total,
                                         double* mean_ms, char** report) {
    if (!lib) return fail_invalid("null argument");
    return guarded([&] {
        const tactag::ClassificationEval eval = tactag::eval_classification(
            lib->impl, k, trials_per_pattern, {}, to_spec(sensor), seed);
        if (correct) *correct = eval.correct;
        if (total) *total = static_cast<int>(eval.trials.size());
        if (mean_ms) *mean_ms = eval.mean_ms;
        if (report) {
            json rows = json::array();
            json confusions = json::array();
            for (const tactag::ClassificationTrial& t : eval.trials) {
                const std::string& truth = lib->impl.entries[t.entry_index].label;
                const std::string& guess = lib->impl.entries[t.predicted_index].label;
                rows.push_back(json{{"entry", t.entry_index},
                                    {"label", truth},
                                    {"predicted", t.predicted_index},
                                    {"predicted_label", guess},
                                    {"x_mm", t.pert.x_mm},
                                    {"y_mm", t.pert.y_mm},
                                    {"theta_z_deg", t.pert.theta_z_deg},
                                    {"loss", t.loss},
                                    {"margin", t.margin},
                                    {"elapsed_ms", t.elapsed_ms},
                                    {"correct", t.correct}});
                if (!t.correct) confusions.push_back(json{{"actual", truth}, {"predicted", guess}});
            }
            const json doc{{"trials", rows},
                           {"confusions", confusions},
                           {"correct", eval.correct},
                           {"total", eval.trials.size()},
                           {"mean_ms", eval.mean_ms}};
            *report = dup_string(doc.dump(2));
        }
    });
}

tactag_status tactag_eval_refinement(const tactag_library* lib, const char* label,
                                     const double* offsets_mm, int n_offsets,
                                     const tactag_sensor* sensor, uint64_t seed,
                                     double* max_abs_error_mm, double* max_percent_error,
                                     char** report) {
    if (!lib || !label || !offsets_mm || n_offsets < 1) return fail_invalid("null argument");
    return guarded([&] {
        const int index = require_entry(lib, label);
        const std::vector<double> offsets(offsets_mm, offsets_mm + n_offsets);
        const tactag::RefinementEval eval =
            tactag::eval_refinement(lib->impl, index, offsets, to_spec(sensor), seed);
        double max_abs = 0.0, max_pct = 0.0;
        json rows = json::array();
        for (const tactag::RefinementRow& r : eval.rows) {
            max_abs = std::max(max_abs, r.abs_error_mm);
            max_pct = std::max(max_pct, r.percent_error);
            rows.push_back(json{{"offset_mm", r.offset_mm},
                                {"y_ref_mm", r.y_ref_mm},
                                {"abs_error_mm", r.abs_error_mm},
                                {"percent_error", r.percent_error},
                                {"theta_z_deg", r.theta_z_deg},
                                {"converged", r.converged}});
        }
        if (max_abs_error_mm) *max_abs_error_mm = max_abs;
        if (max_percent_error) *max_percent_error = max_pct;
        if (report) {
            const json doc{{"rows", rows},
                           {"max_abs_error_mm", max_abs},
                           {"max_percent_error", max_pct}};
            *report = dup_string(doc.dump(2));
        }
    });
}

tactag_status tactag_eval_insertion(const tactag_library* lib, const char* label,
                                    double peg_side_mm, double hole_side_mm, int trials,
                                    int with_refinement, const tactag_sensor* sensor,
                                    uint64_t seed, double* success_rate, char** report) {
    if (!lib || !label) return fail_invalid("null argument");
    return guarded([&] {
        const int index = require_entry(lib, label);
        const tactag::InsertionEval eval = tactag::eval_insertion(
            lib->impl, index, {peg_side_mm, hole_side_mm}, trials, with_refinement != 0, {},
            to_spec(sensor), seed);
        if (success_rate) *success_rate = eval.success_rate;
        if (report) {
            json rows = json::array();
            for (const tactag::InsertionTrial& t : eval.trials) {
                rows.push_back(json{{"x_mm", t.pert.x_mm},
                                    {"y_mm", t.pert.y_mm},
                                    {"theta_z_deg", t.pert.theta_z_deg},
                                    {"y_ref_mm", t.y_ref_mm},
                                    {"residual_y_mm", t.residual_y_mm},
                                    {"success", t.success}});
            }
            const json doc{{"trials", rows},
                           {"success_rate", eval.success_rate},
                           {"with_refinement", with_refinement != 0}};
            *report = dup_string(doc.dump(2));
        }
    });
}

}  // extern "C"
