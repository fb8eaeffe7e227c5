#pragma once

#include <cstddef>

#include "posebounds/geometry.hpp"
#include "posebounds/normalized_bounds.hpp"

namespace posebounds::oracle {

/// Search interval for the brute-force minimizers: a uniform scan with
/// `coarse_steps` intervals, then golden-section refinement on the best cell.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t coarse_steps = 10000;
  int refine = 200;
};

struct MinResult {
  double argmin = 0.0;
  double value = 0.0;
};

enum class ScaleObjective { kSquared, kMpjpe };

/// Minimizes the joint error over the re-projection depth by brute force.
/// `value` is the (non-squared) JPE at the minimizer. Evaluates the error
/// directly from its geometric definition in extended precision and never
/// uses the closed-form optimum. Throws BracketError when the best grid point
/// is on the boundary of [lo, hi].
MinResult grid_min_depth(const DepthMinContext& ctx, const GridSpec& grid);

/// Brute-force minimizer of the weak-perspective error over the scale s.
/// kSquared: mean squared joint error; kMpjpe: mean joint error.
MinResult grid_min_scale(const Pose3D& centered_gt, const Pose2D& centered_2d,
                         ScaleObjective objective, const GridSpec& grid);

/// Grid centered on `center` with half-width `half_width`.
GridSpec grid_around(double center, double half_width,
                     std::size_t coarse_steps = 10000, int refine = 200);

}  // namespace posebounds::oracle
