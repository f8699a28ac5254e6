#include "tactag/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tactag/error.hpp"

namespace tactag {
namespace {

std::vector<Vec2> flatten(const PointCloud& cloud) {
    std::vector<Vec2> out;
    out.reserve(cloud.points.size());
    for (const Vec3& p : cloud.points) out.push_back({p.x, p.y});
    return out;
}

std::vector<Vec2> apply_all(const RigidTransform2D& t, const std::vector<Vec2>& pts) {
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (Vec2 p : pts) out.push_back(t.apply(p));
    return out;
}

// RMSE of each target point to its nearest transformed source point. The
// model cloud may exceed the observation (partial capture), so residuals are
// taken over the observation side.
double nn_rmse(const std::vector<Vec2>& moved_source, const std::vector<Vec2>& target) {
    double acc = 0.0;
    for (Vec2 t : target) {
        double best = std::numeric_limits<double>::infinity();
        for (Vec2 s : moved_source) {
            const Vec2 d = t - s;
            best = std::min(best, dot(d, d));
        }
        acc += best;
    }
    return std::sqrt(acc / target.size());
}

struct WeightedFit {
    RigidTransform2D transform;
    double total_weight = 0.0;
};

// Closed-form weighted planar rigid fit of source onto target from soft
// correspondence weights w[j][i] (target j, source i).
WeightedFit fit_rigid(const std::vector<Vec2>& source, const std::vector<Vec2>& target,
                      const std::vector<std::vector<double>>& w) {
    double W = 0.0;
    Vec2 ms{0, 0}, mt{0, 0};
    for (size_t j = 0; j < target.size(); ++j) {
        for (size_t i = 0; i < source.size(); ++i) {
            const double wij = w[j][i];
            if (wij == 0.0) continue;
            W += wij;
            ms = ms + wij * source[i];
            mt = mt + wij * target[j];
        }
    }
    if (W < 1e-12) throw NumericError("registration lost all correspondences");
    ms = (1.0 / W) * ms;
    mt = (1.0 / W) * mt;

    double a00 = 0, a01 = 0, a10 = 0, a11 = 0;  // sum w * (t - mt)(s - ms)^T
    for (size_t j = 0; j < target.size(); ++j) {
        for (size_t i = 0; i < source.size(); ++i) {
            const double wij = w[j][i];
            if (wij == 0.0) continue;
            const Vec2 t = target[j] - mt, s = source[i] - ms;
            a00 += wij * t.x * s.x;
            a01 += wij * t.x * s.y;
            a10 += wij * t.y * s.x;
            a11 += wij * t.y * s.y;
        }
    }
    if (std::abs(a00 + a11) < 1e-12 && std::abs(a10 - a01) < 1e-12)
        throw NumericError("rank-deficient cross-covariance");
    const double theta = std::atan2(a10 - a01, a00 + a11);
    const double c = std::cos(theta), s = std::sin(theta);
    WeightedFit fit;
    fit.transform = {mt.x - (c * ms.x - s * ms.y), mt.y - (s * ms.x + c * ms.y),
                     rad_to_deg(theta)};
    fit.total_weight = W;
    return fit;
}

}  // namespace

RigidTransform2D initial_align(const PointCloud& source, const Mask& imprint_mask) {
    if (source.points.empty()) throw std::invalid_argument("empty source cloud");
    Vec2 centroid{0, 0};
    for (const Vec3& p : source.points) centroid = centroid + Vec2{p.x, p.y};
    centroid = (1.0 / source.size()) * centroid;
    const Vec2 target = imprint_mask.bounds_center_mm();
    return {target.x - centroid.x, target.y - centroid.y, 0.0};
}

RefinementResult register_clouds(const PointCloud& source, const PointCloud& target,
                                 const RigidTransform2D& init, const RegistrationParams& params,
                                 std::vector<double>* residual_trace) {
    if (source.size() < 10 || target.size() < 10)
        throw std::invalid_argument("registration needs at least 10 points per cloud");
    if (params.max_iterations < 1 || params.sigma0_mm <= 0.0 || params.sigma_floor_mm <= 0.0 ||
        params.sigma_decay <= 0.0 || params.sigma_decay > 1.0 || params.outlier_weight < 0.0 ||
        params.outlier_weight >= 1.0)
        throw std::invalid_argument("invalid registration parameters");

    const std::vector<Vec2> src = flatten(source);
    const std::vector<Vec2> tgt = flatten(target);

    // Uniform outlier density over the observation's bounding box.
    double minx = tgt[0].x, maxx = tgt[0].x, miny = tgt[0].y, maxy = tgt[0].y;
    for (Vec2 t : tgt) {
        minx = std::min(minx, t.x);
        maxx = std::max(maxx, t.x);
        miny = std::min(miny, t.y);
        maxy = std::max(maxy, t.y);
    }
    const double area = std::max((maxx - minx) * (maxy - miny), 1e-6);

    RigidTransform2D current = init;
    RigidTransform2D best_pose = init;
    double best_rmse = nn_rmse(apply_all(current, src), tgt);
    if (residual_trace) {
        residual_trace->clear();
        residual_trace->push_back(best_rmse);
    }

    bool converged = false;
    double sigma = params.sigma0_mm;
    std::vector<std::vector<double>> w(tgt.size(), std::vector<double>(src.size(), 0.0));
    // One E/M update from the current pose. The iteration runs free (EM may
    // pass through poses with a higher point-to-point residual on its way to
    // the basin), while the best pose visited is kept and the trace records
    // the running minimum, so the reported residual never rises.
    auto step = [&](bool hard_nn) {
        const std::vector<Vec2> moved = apply_all(current, src);
        if (hard_nn) {
            for (size_t j = 0; j < tgt.size(); ++j) {
                std::fill(w[j].begin(), w[j].end(), 0.0);
                size_t best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (size_t i = 0; i < src.size(); ++i) {
                    const Vec2 d = tgt[j] - moved[i];
                    const double q = dot(d, d);
                    if (q < bd) {
                        bd = q;
                        best = i;
                    }
                }
                w[j][best] = 1.0;
            }
        } else {
            const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
            const double outlier = params.outlier_weight / (1.0 - params.outlier_weight) *
                                   (2.0 * std::numbers::pi * sigma * sigma) * src.size() / area;
            for (size_t j = 0; j < tgt.size(); ++j) {
                double denom = outlier;
                for (size_t i = 0; i < src.size(); ++i) {
                    const Vec2 d = tgt[j] - moved[i];
                    w[j][i] = std::exp(-dot(d, d) * inv2s2);
                    denom += w[j][i];
                }
                if (denom <= 0.0) continue;
                for (size_t i = 0; i < src.size(); ++i) w[j][i] /= denom;
            }
        }

        const WeightedFit fit = fit_rigid(src, tgt, w);
        const std::vector<Vec2> cand_moved = apply_all(fit.transform, src);
        const double cand_rmse = nn_rmse(cand_moved, tgt);

        double shift = 0.0;
        for (size_t i = 0; i < src.size(); ++i) shift += norm(cand_moved[i] - moved[i]);
        shift /= src.size();

        current = fit.transform;
        if (cand_rmse < best_rmse) {
            best_rmse = cand_rmse;
            best_pose = current;
        }
        if (residual_trace) residual_trace->push_back(best_rmse);
        return shift < params.convergence_tol_mm;
    };

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        converged = step(params.use_icp);
        sigma = std::max(params.sigma_floor_mm, sigma * params.sigma_decay);
        if (converged) break;
    }
    if (!params.use_icp && best_rmse < 0.5 * params.sigma_floor_mm) {
        // The sigma floor leaves the soft correspondences slightly smeared,
        // which caps rotation accuracy; a short hard-assignment phase snaps
        // the pose the rest of the way. Hard assignments are only trusted
        // when the clouds already coincide point-for-point (residual well
        // under the bandwidth floor); when the two clouds are distinct
        // samplings of the surface, nearest neighbors lock onto the sampling
        // structure and bias the pose, so the soft result is kept.
        current = best_pose;
        for (int iter = 0; iter < 10; ++iter) {
            if (step(true)) {
                converged = true;
                break;
            }
        }
    }

    RefinementResult result;
    result.transform = best_pose;
    result.transform.theta_z_deg = normalize_deg(result.transform.theta_z_deg);
    result.y_ref = result.transform.ty;
    result.theta_z_deg = result.transform.theta_z_deg;
    result.residual_rmse_mm = best_rmse;
    result.converged = converged;
    return result;
}

RefinementResult refine_pose(const PointCloud& imprint_cloud, const Mask& imprint_mask,
                             const LibraryEntry& entry, const RegistrationParams& params) {
    const RigidTransform2D init = initial_align(entry.cloud, imprint_mask);
    // The imprint carries one point per mask pixel, an order of magnitude
    // denser than the library cloud; downsampling keeps the EM cost small.
    // The voxel size is deliberately off-multiple of both the pixel pitch
    // and the library voxel so neither cloud can lattice-lock against the
    // other: cells swallow a varying number of pixels, which jitters the
    // centroids and leaves the true pose as the only stable minimum.
    if (params.target_voxel_mm > 0.0) {
        PointCloud target = voxel_downsample(imprint_cloud, params.target_voxel_mm);
        return register_clouds(entry.cloud, target, init, params);
    }
    return register_clouds(entry.cloud, imprint_cloud, init, params);
}

}  // namespace tactag
