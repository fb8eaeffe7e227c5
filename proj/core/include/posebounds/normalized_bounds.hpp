#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "posebounds/geometry.hpp"

namespace posebounds {

/// One joint's depth-only minimization problem. The re-projected estimate of
/// the joint lies on the ray (a, b, 1) * depth; `joint` is the ground truth.
struct DepthMinContext {
  double a = 0.0;
  double b = 0.0;
  Vec3 joint = Vec3::Zero();
};

/// Best-case 3D estimate under a simplified projection model, before any
/// evaluation-protocol alignment.
struct BestCaseResult {
  Pose3D estimate;
  std::vector<double> per_joint_jpe;  // meters
  double mpjpe = 0.0;                 // meters
};

/// Depth along the ray (a, b, 1) closest to the ground-truth joint:
/// (a X + b Y + Z) / (1 + a^2 + b^2).
double optimal_depth(const DepthMinContext& ctx) noexcept;

/// Squared joint error at re-projection depth `depth`.
double squared_depth_error(const DepthMinContext& ctx, double depth) noexcept;

/// Closed-form minimal JPE of a single joint under translation normalization
/// with root depth `root_depth` and in-plane offset (dx, dy). For dy = 0 this
/// is |dx (1/Z_i - 1/Z)| sqrt((Y_i^2 + Z_i^2) / (1 + a^2 + b^2)).
double translation_min_jpe(const Vec3& joint, double root_depth, double dx,
                           double dy);

/// Closed-form minimal JPE of a single joint under scale normalization:
/// |1 - rho Z_i / (Z_i + dz)| sqrt((X_i^2 + Y_i^2) / (1 + a^2 + b^2)).
double scaling_min_jpe(const Vec3& joint, double dz, double rho);

/// Shift by (dx, dy, 0), project, move the root to the image origin and
/// re-project every joint at its error-minimizing depth. The pose must be
/// root-centered in X and Y (RootNotCentered otherwise) and the estimate is
/// compared against that centered pose.
BestCaseResult best_case_translation(const Pose3D& pose, const Camera& cam,
                                     double dx, double dy, std::size_t root);

/// Shift by dz along the optical axis, project, rescale the 2D pose by rho and
/// re-project every joint at its error-minimizing depth. The estimate is
/// compared against the unshifted pose.
BestCaseResult best_case_scaling(const Pose3D& pose, const Camera& cam,
                                 double dz, double rho);

/// The rho that brings the projection of the pose, shifted by dz, to the
/// target scale (target / scale_measure).
double normalization_rho(const Pose3D& pose, const Camera& cam, double dz,
                         double target_scale, std::size_t root);

/// Re-projection of the un-shifted 2D pose with the given depths. With the
/// true depths this recovers the ground truth exactly, i.e. a relaxed
/// normalization that re-projects original 2D locations has no lower bound.
Pose3D relaxed_reproject_exact(const Pose2D& original_2d,
                               std::span<const double> true_depths,
                               const Camera& cam);

}  // namespace posebounds
