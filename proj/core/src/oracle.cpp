#include "posebounds/oracle.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace posebounds::oracle {
namespace {

using Real = long double;

void check_grid(const GridSpec& g) {
  if (!(g.lo < g.hi)) throw BracketError("grid needs lo < hi");
  if (g.coarse_steps < 2) throw BracketError("grid needs at least 2 steps");
}

MinResult minimize(const std::function<Real(Real)>& f, const GridSpec& g) {
  check_grid(g);
  const Real lo = g.lo;
  const Real h = (static_cast<Real>(g.hi) - lo) / static_cast<Real>(g.coarse_steps);

  std::size_t best = 0;
  Real best_value = f(lo);
  for (std::size_t i = 1; i <= g.coarse_steps; ++i) {
    const Real v = f(lo + h * static_cast<Real>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best == g.coarse_steps) {
    throw BracketError("minimum on grid boundary at " +
                       std::to_string(static_cast<double>(lo + h * static_cast<Real>(best))));
  }

  Real a = lo + h * static_cast<Real>(best - 1);
  Real b = lo + h * static_cast<Real>(best + 1);
  const Real inv_phi = (std::sqrt(static_cast<Real>(5)) - 1) / 2;
  Real c = b - inv_phi * (b - a);
  Real d = a + inv_phi * (b - a);
  Real fc = f(c);
  Real fd = f(d);
  for (int it = 0; it < g.refine && c < d; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const Real x = (a + b) / 2;
  return {static_cast<double>(x), static_cast<double>(f(x))};
}

}  // namespace

GridSpec grid_around(double center, double half_width, std::size_t coarse_steps,
                     int refine) {
  return {center - half_width, center + half_width, coarse_steps, refine};
}

MinResult grid_min_depth(const DepthMinContext& ctx, const GridSpec& grid) {
  const Real a = ctx.a;
  const Real b = ctx.b;
  const Real X = ctx.joint.x();
  const Real Y = ctx.joint.y();
  const Real Z = ctx.joint.z();
  auto sq_error = [&](Real z) {
    const Real ex = z * a - X;
    const Real ey = z * b - Y;
    const Real ez = z - Z;
    return ex * ex + ey * ey + ez * ez;
  };
  MinResult r = minimize(sq_error, grid);
  r.value = static_cast<double>(std::sqrt(sq_error(static_cast<Real>(r.argmin))));
  return r;
}

MinResult grid_min_scale(const Pose3D& centered_gt, const Pose2D& centered_2d,
                         ScaleObjective objective, const GridSpec& grid) {
  if (centered_gt.size() != centered_2d.size() || centered_gt.size() == 0) {
    throw SkeletonMismatch("3D and 2D poses differ in joint count");
  }
  const std::size_t n = centered_gt.size();
  auto f = [&](Real s) {
    Real sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Real ex = static_cast<Real>(centered_gt[i].x()) - s * centered_2d[i].x();
      const Real ey = static_cast<Real>(centered_gt[i].y()) - s * centered_2d[i].y();
      const Real sq = ex * ex + ey * ey;
      sum += objective == ScaleObjective::kSquared ? sq : std::sqrt(sq);
    }
    return sum / static_cast<Real>(n);
  };
  return minimize(f, grid);
}

}  // namespace posebounds::oracle
