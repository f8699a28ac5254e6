/* tactag: tactile pattern tagging for 3D-printed parts.
 *
 * C interface to the pattern library pipeline: generation of unique
 * triangular tactile patterns, IoU classification of imprint masks, and
 * rigid pose refinement from imprint point clouds. All state lives behind
 * opaque handles; every call reports a tactag_status and leaves a
 * human-readable message in tactag_last_error() on failure.
 */
#ifndef TACTAG_H
#define TACTAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TACTAG_API __declspec(dllexport)
#else
#  define TACTAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tactag_status {
    TACTAG_OK = 0,
    TACTAG_INVALID_ARGUMENT = 1, /* precondition violated, bad parameter */
    TACTAG_IO_ERROR = 2,         /* filesystem failure */
    TACTAG_DATA_ERROR = 3,       /* malformed or inconsistent persisted data */
    TACTAG_NUMERIC_ERROR = 4     /* degenerate geometry, generation stall */
} tactag_status;

/* Message for the most recent failure on this thread. Never NULL. */
TACTAG_API const char* tactag_last_error(void);

typedef struct tactag_library tactag_library;

/* ---- library generation ------------------------------------------------ */

typedef struct tactag_generate_params {
    int count;                /* patterns to admit */
    int divisions;            /* staggered grid divisions (>= 2) */
    double extent;            /* grid square side, grid units */
    int n_min, n_max;         /* triangles per pattern */
    double alpha;             /* dispersion threshold on Hu distance */
    double scale_mm;          /* physical pattern size */
    double pitch_mm;          /* raster pitch */
    int dilate_radius_px;     /* classification-side dilation */
    double depth_mm;          /* imprint depth */
    double subdivide_max_edge;/* mesh subdivision bound, grid units */
    double voxel_mm;          /* registration cloud voxel size */
    double anneal_t0;
    double anneal_beta;
    int anneal_max_iters;
    uint64_t seed;
    int max_attempts;         /* candidate budget; <= 0 for 200*count */
} tactag_generate_params;

/* Full-scale defaults: 4x4 grid, N in [10,20], alpha 0.1, 5 mm / 0.05 mm. */
TACTAG_API void tactag_generate_params_init(tactag_generate_params* p);

TACTAG_API tactag_status tactag_library_generate(const tactag_generate_params* p,
                                                 tactag_library** out);

/* ---- persistence / inspection ------------------------------------------ */

TACTAG_API tactag_status tactag_library_save(const tactag_library* lib, const char* dir);
/* strict != 0 re-verifies Hu signatures and the dispersion invariant. */
TACTAG_API tactag_status tactag_library_load(const char* dir, int strict, tactag_library** out);
TACTAG_API void tactag_library_free(tactag_library* lib);

TACTAG_API int tactag_library_size(const tactag_library* lib);
/* Pointer valid while the library lives. NULL for a bad index. */
TACTAG_API const char* tactag_library_label(const tactag_library* lib, int index);
/* Index for a label, -1 when absent. */
TACTAG_API int tactag_library_find(const tactag_library* lib, const char* label);
/* Minimum pairwise symmetrized Hu distance over the library. */
TACTAG_API tactag_status tactag_library_dispersion(const tactag_library* lib, double* out);

/* Write one entry's pattern prism STL and/or registration cloud PLY.
 * Either path may be NULL to skip. */
TACTAG_API tactag_status tactag_export_entry(const tactag_library* lib, const char* label,
                                             const char* stl_path, const char* ply_path);

/* ---- classification ------------------------------------------------------ */

typedef struct tactag_classification {
    int index;
    char label[64];
    double loss;             /* IoU loss of the winning entry, in [0,1] */
    double runner_up_margin; /* second-best loss minus best loss */
    double elapsed_ms;
} tactag_classification;

/* mask_path: PGM (P2/P5, thresholded at 128) or PBM (P1/P4). pitch_mm <= 0
 * takes the pitch from the file comment or the library default. */
TACTAG_API tactag_status tactag_classify_file(const tactag_library* lib, const char* mask_path,
                                              double pitch_mm, tactag_classification* out);

/* In-memory variant; bits is width*height bytes, nonzero = set, row 0 at the
 * frame's lowest y. */
TACTAG_API tactag_status tactag_classify_mask(const tactag_library* lib, int width, int height,
                                              double pitch_mm, const uint8_t* bits,
                                              tactag_classification* out);

/* ---- pose refinement ----------------------------------------------------- */

typedef struct tactag_refine_params {
    int max_iterations;
    double convergence_tol_mm;
    double sigma0_mm;
    double sigma_decay;
    double sigma_floor_mm;
    double outlier_weight;
    int use_icp; /* nearest-neighbor baseline instead of EM */
} tactag_refine_params;

TACTAG_API void tactag_refine_params_init(tactag_refine_params* p);

typedef struct tactag_refinement {
    double tx_mm, ty_mm, theta_z_deg;
    double y_ref_mm;          /* == ty_mm, the Y pose correction */
    double residual_rmse_mm;
    int converged;
} tactag_refinement;

/* Register the entry's library cloud onto an imprint cloud (ASCII PLY) with
 * the imprint mask supplying the initial alignment. params may be NULL. */
TACTAG_API tactag_status tactag_refine_files(const tactag_library* lib, const char* label,
                                             const char* cloud_ply_path, const char* mask_path,
                                             double pitch_mm, const tactag_refine_params* params,
                                             tactag_refinement* out);

/* ---- imprint simulation -------------------------------------------------- */

typedef struct tactag_sensor {
    double width_mm, height_mm;
    double pitch_mm;
    double depth_mm;
    double depth_noise_sigma_mm;
    double dropout_fraction;
} tactag_sensor;

/* 12x12 mm window, 0.05 mm pitch, 1 mm depth, sigma 0.02 mm, dropout 0.05. */
TACTAG_API void tactag_sensor_init(tactag_sensor* s);

/* Render one perturbed imprint of a library entry; writes the mask (PGM) and
 * point cloud (PLY). Either output path may be NULL. */
TACTAG_API tactag_status tactag_simulate(const tactag_library* lib, const char* label,
                                         double x_mm, double y_mm, double theta_z_deg,
                                         const tactag_sensor* sensor, uint64_t seed,
                                         const char* mask_out_path, const char* cloud_out_path);

/* ---- evaluation harnesses ------------------------------------------------ */

/* Each harness returns a JSON report (per-trial rows plus a summary) as a
 * heap string owned by the caller; free with tactag_string_free. report may
 * be NULL when only the summary outputs are wanted. sensor NULL = defaults. */
TACTAG_API void tactag_string_free(char* s);

TACTAG_API tactag_status tactag_eval_classification(const tactag_library* lib, int k,
                                                    int trials_per_pattern,
                                                    const tactag_sensor* sensor, uint64_t seed,
                                                    int* correct, int* total, double* mean_ms,
                                                    char** report);

TACTAG_API tactag_status tactag_eval_refinement(const tactag_library* lib, const char* label,
                                                const double* offsets_mm, int n_offsets,
                                                const tactag_sensor* sensor, uint64_t seed,
                                                double* max_abs_error_mm,
                                                double* max_percent_error, char** report);

TACTAG_API tactag_status tactag_eval_insertion(const tactag_library* lib, const char* label,
                                               double peg_side_mm, double hole_side_mm,
                                               int trials, int with_refinement,
                                               const tactag_sensor* sensor, uint64_t seed,
                                               double* success_rate, char** report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TACTAG_H */
