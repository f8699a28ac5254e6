#ifndef TACTAG_REGISTRATION_HPP
#define TACTAG_REGISTRATION_HPP

#include <vector>

#include "tactag/library.hpp"
#include "tactag/mask.hpp"
#include "tactag/mesh.hpp"
#include "tactag/transform2d.hpp"

namespace tactag {

struct RegistrationParams {
    int max_iterations = 50;
    double convergence_tol_mm = 1e-3;  // mean transformed-source shift per iteration
    double sigma0_mm = 1.0;            // initial correspondence bandwidth
    double sigma_decay = 0.7;          // bandwidth factor per EM iteration
    double sigma_floor_mm = 0.1;
    double outlier_weight = 0.1;       // uniform component mass, in [0, 1)
    bool use_icp = false;              // nearest-neighbor baseline instead of EM
    double target_voxel_mm = 0.13;     // refine_pose downsamples the imprint cloud; 0 disables
};

struct RefinementResult {
    RigidTransform2D transform;  // total source -> target, init included
    double y_ref = 0.0;          // == transform.ty
    double theta_z_deg = 0.0;    // == transform.theta_z_deg
    double residual_rmse_mm = 0.0;
    bool converged = false;
};

// Pure translation taking the source centroid to the center of the box
// bounding the imprint mask, in frame mm. Throws on empty inputs.
RigidTransform2D initial_align(const PointCloud& source, const Mask& imprint_mask);

// Planar rigid registration of source onto target starting from init.
// E-step: Gaussian correspondence weights with an annealed bandwidth and a
// uniform outlier component. M-step: closed-form weighted rigid fit
// (cross-covariance), restricted to (tx, ty, theta_z). z is flattened.
// Every iterate is scored by nearest-neighbor RMSE and the best-scoring
// pose wins; the recorded residual trace is the running minimum, hence
// non-increasing.
// Throws NumericError on degenerate geometry, std::invalid_argument when
// either cloud has fewer than 10 points.
RefinementResult register_clouds(const PointCloud& source, const PointCloud& target,
                                 const RigidTransform2D& init,
                                 const RegistrationParams& params = {},
                                 std::vector<double>* residual_trace = nullptr);

// initial_align then register_clouds against the entry's cached cloud.
RefinementResult refine_pose(const PointCloud& imprint_cloud, const Mask& imprint_mask,
                             const LibraryEntry& entry, const RegistrationParams& params = {});

}  // namespace tactag

#endif
