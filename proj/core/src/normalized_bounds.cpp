#include "posebounds/normalized_bounds.hpp"

#include <cmath>
#include <string>

namespace posebounds {
namespace {

constexpr double kRootCenterTol = 1e-9;

void require_positive_depths(const Pose3D& pose, const char* what) {
  for (std::size_t i = 0; i < pose.size(); ++i) {
    if (!(pose[i].z() > 0.0)) {
      throw NonPositiveDepth(std::string(what) + ": joint " +
                             std::to_string(i) + " has non-positive depth");
    }
  }
}

// Re-projects the normalized 2D pose at the error-minimizing depth of every
// joint and fills in the errors against `truth`.
BestCaseResult best_case_from_normalized(const Pose2D& normalized,
                                         const Pose3D& truth,
                                         const Camera& cam) {
  const double f = cam.focal();
  std::vector<double> depths(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const DepthMinContext ctx{normalized[i].x() / f, normalized[i].y() / f,
                              truth[i]};
    depths[i] = optimal_depth(ctx);
  }

  BestCaseResult out;
  out.estimate = reproject(normalized, depths, cam);
  out.per_joint_jpe.resize(truth.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.per_joint_jpe[i] = (out.estimate[i] - truth[i]).norm();
    sum += out.per_joint_jpe[i];
  }
  out.mpjpe = truth.size() ? sum / static_cast<double>(truth.size()) : 0.0;
  return out;
}

}  // namespace

double optimal_depth(const DepthMinContext& ctx) noexcept {
  const Vec3& P = ctx.joint;
  return (ctx.a * P.x() + ctx.b * P.y() + P.z()) /
         (1.0 + ctx.a * ctx.a + ctx.b * ctx.b);
}

double squared_depth_error(const DepthMinContext& ctx, double depth) noexcept {
  const Vec3& P = ctx.joint;
  const double ex = depth * ctx.a - P.x();
  const double ey = depth * ctx.b - P.y();
  const double ez = depth - P.z();
  return ex * ex + ey * ey + ez * ez;
}

double translation_min_jpe(const Vec3& joint, double root_depth, double dx,
                           double dy) {
  if (!(joint.z() > 0.0) || !(root_depth > 0.0)) {
    throw NonPositiveDepth("translation bound needs positive depths");
  }
  const double X = joint.x();
  const double Y = joint.y();
  const double Z = joint.z();
  const double k = 1.0 / Z - 1.0 / root_depth;
  const double a = X / Z + dx * k;
  const double b = Y / Z + dy * k;
  // |P x (a, b, 1)| / |(a, b, 1)|, expanded. Reduces to the dx-only form for
  // dy = 0.
  const double cross = X * dy - Y * dx;
  const double num = (dx * dx + dy * dy) * Z * Z + cross * cross;
  return std::abs(k) * std::sqrt(num / (1.0 + a * a + b * b));
}

double scaling_min_jpe(const Vec3& joint, double dz, double rho) {
  const double shifted = joint.z() + dz;
  if (!(shifted > 0.0)) {
    throw NonPositiveDepth("scaling bound needs positive shifted depth");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidScale("rho must be positive and finite");
  }
  const double a = rho * joint.x() / shifted;
  const double b = rho * joint.y() / shifted;
  const double lateral2 = joint.x() * joint.x() + joint.y() * joint.y();
  return std::abs(1.0 - rho * joint.z() / shifted) *
         std::sqrt(lateral2 / (1.0 + a * a + b * b));
}

BestCaseResult best_case_translation(const Pose3D& pose, const Camera& cam,
                                     double dx, double dy, std::size_t root) {
  if (root >= pose.size()) throw SkeletonMismatch("root index out of range");
  if (std::abs(pose[root].x()) > kRootCenterTol ||
      std::abs(pose[root].y()) > kRootCenterTol) {
    throw RootNotCentered("root joint must be at X = Y = 0 before shifting");
  }
  require_positive_depths(pose, "best_case_translation");

  const Pose3D shifted = shift_pose(pose, {dx, dy, 0.0});
  const Pose2D normalized =
      center_at_root(project_perspective(shifted, cam), root);
  return best_case_from_normalized(normalized, pose, cam);
}

BestCaseResult best_case_scaling(const Pose3D& pose, const Camera& cam,
                                 double dz, double rho) {
  require_positive_depths(pose, "best_case_scaling");
  const Pose3D shifted = shift_pose(pose, {0.0, 0.0, dz});
  require_positive_depths(shifted, "best_case_scaling (shifted)");
  const Pose2D normalized =
      rescale_pose(project_perspective(shifted, cam), rho);
  return best_case_from_normalized(normalized, pose, cam);
}

double normalization_rho(const Pose3D& pose, const Camera& cam, double dz,
                         double target_scale, std::size_t root) {
  if (!(target_scale > 0.0) || !std::isfinite(target_scale)) {
    throw InvalidScale("target scale must be positive and finite");
  }
  const Pose2D p = project_perspective(shift_pose(pose, {0.0, 0.0, dz}), cam);
  return target_scale / scale_measure(p, root);
}

Pose3D relaxed_reproject_exact(const Pose2D& original_2d,
                               std::span<const double> true_depths,
                               const Camera& cam) {
  return reproject(original_2d, true_depths, cam);
}

}  // namespace posebounds
