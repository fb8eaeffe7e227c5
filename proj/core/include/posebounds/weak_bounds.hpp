#pragma once

#include <cstddef>
#include <vector>

#include "posebounds/geometry.hpp"

namespace posebounds {

/// Best-case fit under weak perspective projection. The estimate keeps the
/// perfect depths of the X-Y centered ground truth and scales the root-centered
/// 2D pose by a single factor s (which subsumes Z_avg / f).
struct WeakFit {
  double s_star = 0.0;
  Pose3D centered_gt;   // P': root at X = Y = 0, depths unchanged
  Pose2D centered_2d;   // p': root at the image origin
  Pose3D estimate;      // (s* x'_i, s* y'_i, Z'_i)
  double mse = 0.0;     // mean squared joint error at s*, m^2
  std::vector<double> per_joint_jpe;
  double mpjpe = 0.0;
};

struct WeakScaleGap {
  double s_mpjpe = 0.0;  // minimizer of the non-squared MPJPE
  double gap = 0.0;      // MPJPE(s*) - MPJPE(s_mpjpe), meters, >= 0
};

/// s* = sum(X'x' + Y'y') / sum(x'^2 + y'^2). Throws DegeneratePose if all 2D
/// points are at the origin.
double optimal_weak_scale(const Pose3D& centered_gt, const Pose2D& centered_2d);

/// Mean squared joint error of the weak estimate at scale s (depths exact).
double weak_squared_error(const Pose3D& centered_gt, const Pose2D& centered_2d,
                          double s);

/// d/ds of weak_squared_error.
double weak_squared_error_derivative(const Pose3D& centered_gt,
                                     const Pose2D& centered_2d, double s);

/// Non-squared MPJPE of the weak estimate at scale s.
double weak_mpjpe(const Pose3D& centered_gt, const Pose2D& centered_2d,
                  double s);

WeakFit best_case_weak(const Pose3D& pose, const Camera& cam, std::size_t root);

/// Minimizes the non-squared MPJPE over s in [s*/10, 10 s*] by golden-section
/// search (1e-12 tolerance in s) and reports how much worse s* is.
WeakScaleGap weak_scale_mpjpe_gap(const Pose3D& centered_gt,
                                  const Pose2D& centered_2d);

}  // namespace posebounds
