#include "posebounds/weak_bounds.hpp"

#include <algorithm>
#include <cmath>

namespace posebounds {
namespace {

void require_same_size(const Pose3D& gt, const Pose2D& p) {
  if (gt.size() != p.size()) {
    throw SkeletonMismatch("3D and 2D poses have different joint counts");
  }
  if (gt.size() == 0) throw DegeneratePose("empty pose");
}

}  // namespace

double optimal_weak_scale(const Pose3D& centered_gt, const Pose2D& centered_2d) {
  require_same_size(centered_gt, centered_2d);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < centered_gt.size(); ++i) {
    const Vec2& p = centered_2d[i];
    num += centered_gt[i].x() * p.x() + centered_gt[i].y() * p.y();
    den += p.squaredNorm();
  }
  if (!(den > 0.0)) {
    throw DegeneratePose("all centered 2D points are at the origin");
  }
  return num / den;
}

double weak_squared_error(const Pose3D& centered_gt, const Pose2D& centered_2d,
                          double s) {
  require_same_size(centered_gt, centered_2d);
  double sum = 0.0;
  for (std::size_t i = 0; i < centered_gt.size(); ++i) {
    sum += (centered_gt[i].head<2>() - s * centered_2d[i]).squaredNorm();
  }
  return sum / static_cast<double>(centered_gt.size());
}

double weak_squared_error_derivative(const Pose3D& centered_gt,
                                     const Pose2D& centered_2d, double s) {
  require_same_size(centered_gt, centered_2d);
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < centered_gt.size(); ++i) {
    quad += centered_2d[i].squaredNorm();
    lin += centered_gt[i].head<2>().dot(centered_2d[i]);
  }
  const double n = static_cast<double>(centered_gt.size());
  return 2.0 * s * quad / n - 2.0 * lin / n;
}

double weak_mpjpe(const Pose3D& centered_gt, const Pose2D& centered_2d,
                  double s) {
  require_same_size(centered_gt, centered_2d);
  double sum = 0.0;
  for (std::size_t i = 0; i < centered_gt.size(); ++i) {
    sum += (centered_gt[i].head<2>() - s * centered_2d[i]).norm();
  }
  return sum / static_cast<double>(centered_gt.size());
}

WeakFit best_case_weak(const Pose3D& pose, const Camera& cam, std::size_t root) {
  if (root >= pose.size()) throw SkeletonMismatch("root index out of range");

  WeakFit fit;
  fit.centered_2d = center_at_root(project_perspective(pose, cam), root);
  fit.centered_gt = center_xy_at_root(pose, root);
  fit.s_star = optimal_weak_scale(fit.centered_gt, fit.centered_2d);

  const std::size_t n = pose.size();
  fit.estimate.joints.resize(n);
  fit.per_joint_jpe.resize(n);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 xy = fit.s_star * fit.centered_2d[i];
    fit.estimate[i] = Vec3(xy.x(), xy.y(), fit.centered_gt[i].z());
    const Vec3 d = fit.estimate[i] - fit.centered_gt[i];
    fit.per_joint_jpe[i] = d.norm();
    sum += fit.per_joint_jpe[i];
    sq += d.squaredNorm();
  }
  fit.mpjpe = sum / static_cast<double>(n);
  fit.mse = sq / static_cast<double>(n);
  return fit;
}

WeakScaleGap weak_scale_mpjpe_gap(const Pose3D& centered_gt,
                                  const Pose2D& centered_2d) {
  const double s_star = optimal_weak_scale(centered_gt, centered_2d);
  auto objective = [&](double s) { return weak_mpjpe(centered_gt, centered_2d, s); };

  double lo = std::min(s_star / 10.0, 10.0 * s_star);
  double hi = std::max(s_star / 10.0, 10.0 * s_star);
  if (lo == hi) {  // s* == 0
    lo -= 1.0;
    hi += 1.0;
  }

  // The MPJPE is a sum of norms of affine functions of s, hence convex.
  constexpr double kTol = 1e-12;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = objective(c);
  double fd = objective(d);
  while (hi - lo > kTol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = objective(d);
    }
    if (c >= d) break;  // interval collapsed to floating-point resolution
  }

  WeakScaleGap out;
  out.s_mpjpe = 0.5 * (lo + hi);
  const double at_star = objective(s_star);
  const double at_min = objective(out.s_mpjpe);
  if (at_min > at_star) {
    out.s_mpjpe = s_star;
    out.gap = 0.0;
  } else {
    out.gap = at_star - at_min;
  }
  return out;
}

}  // namespace posebounds
