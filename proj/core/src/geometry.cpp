#include "posebounds/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace posebounds {

Skeleton::Skeleton(std::vector<std::string> joint_names, std::size_t root,
                   std::vector<Edge> edges)
    : names_(std::move(joint_names)), root_(root), edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw ValidationError("skeleton has no joints");
  if (root_ >= n) {
    throw ValidationError("skeleton root index " + std::to_string(root_) +
                          " out of range for " + std::to_string(n) + " joints");
  }
  std::set<Edge> seen;
  for (const auto& [i, j] : edges_) {
    if (i >= n || j >= n) {
      throw ValidationError("skeleton edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range");
    }
    if (i == j) {
      throw ValidationError("skeleton edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ") is a self loop");
    }
    if (!seen.insert(std::minmax(i, j)).second) {
      throw ValidationError("duplicate skeleton edge (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
    }
  }

  // Union-find over the edge list for connectivity.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& [i, j] : edges_) {
    const auto ri = find(i);
    const auto rj = find(j);
    if (ri != rj) {
      parent[ri] = rj;
      --components;
    }
  }
  if (components != 1) {
    throw ValidationError("skeleton edge graph is not connected (" +
                          std::to_string(components) + " components)");
  }
}

Camera::Camera(double focal) : focal_(focal) {
  if (!(focal > 0.0) || !std::isfinite(focal)) {
    throw InvalidScale("focal length must be positive and finite");
  }
}

Pose2D project_perspective(const Pose3D& pose, const Camera& cam) {
  const double f = cam.focal();
  Pose2D out;
  out.points.reserve(pose.size());
  for (std::size_t i = 0; i < pose.size(); ++i) {
    const Vec3& P = pose[i];
    if (!(P.z() > 0.0)) {
      throw NonPositiveDepth("joint " + std::to_string(i) +
                             " has non-positive depth " + std::to_string(P.z()));
    }
    out.points.emplace_back(f * P.x() / P.z(), f * P.y() / P.z());
  }
  return out;
}

Pose3D shift_pose(const Pose3D& pose, const ShiftVector& d) {
  const Vec3 offset(d.dx, d.dy, d.dz);
  Pose3D out = pose;
  for (auto& j : out.joints) j += offset;
  return out;
}

Pose2D center_at_root(const Pose2D& p, std::size_t root) {
  if (root >= p.size()) throw SkeletonMismatch("root index out of range");
  const Vec2 origin = p[root];
  Pose2D out = p;
  for (auto& q : out.points) q -= origin;
  return out;
}

Pose3D center_xy_at_root(const Pose3D& pose, std::size_t root) {
  if (root >= pose.size()) throw SkeletonMismatch("root index out of range");
  const Vec3 offset(pose[root].x(), pose[root].y(), 0.0);
  Pose3D out = pose;
  for (auto& j : out.joints) j -= offset;
  return out;
}

double scale_measure(const Pose2D& p, std::size_t root) {
  if (root >= p.size()) throw SkeletonMismatch("root index out of range");
  if (p.size() < 2) {
    throw DegeneratePose("scale measure needs at least one non-root point");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != root) sum += (p[i] - p[root]).norm();
  }
  const double mean = sum / static_cast<double>(p.size() - 1);
  if (!(mean > 0.0)) {
    throw DegeneratePose("all 2D points coincide with the root");
  }
  return mean;
}

Pose2D rescale_pose(const Pose2D& p, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidScale("scale factor must be positive and finite");
  }
  Pose2D out = p;
  for (auto& q : out.points) q *= rho;
  return out;
}

Pose3D reproject(const Pose2D& p, std::span<const double> depths,
                 const Camera& cam) {
  if (depths.size() != p.size()) {
    throw SkeletonMismatch("depth count does not match point count");
  }
  const double f = cam.focal();
  Pose3D out;
  out.joints.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double z = depths[i];
    if (!(z > 0.0)) {
      throw NonPositiveDepth("re-projection depth of joint " +
                             std::to_string(i) + " is non-positive");
    }
    out.joints.emplace_back(p[i].x() * z / f, p[i].y() * z / f, z);
  }
  return out;
}

std::vector<double> depths_of(const Pose3D& pose) {
  std::vector<double> z(pose.size());
  std::transform(pose.joints.begin(), pose.joints.end(), z.begin(),
                 [](const Vec3& j) { return j.z(); });
  return z;
}

Pose3D place_at_target_scale(const Pose3D& pose, const Camera& cam,
                             double target, std::size_t root) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw InvalidScale("target scale must be positive and finite");
  }
  if (root >= pose.size()) throw SkeletonMismatch("root index out of range");

  // Root on the optical axis at depth zero; candidates add a depth offset.
  Pose3D base = center_xy_at_root(pose, root);
  const double root_depth = base[root].z();
  for (auto& j : base.joints) j.z() -= root_depth;

  double nearest = 0.0;  // largest amount a joint sits in front of the root
  for (const auto& j : base.joints) nearest = std::max(nearest, -j.z());

  auto measure_at = [&](double depth) {
    return scale_measure(
        project_perspective(shift_pose(base, {0.0, 0.0, depth}), cam), root);
  };

  constexpr double kLo = 0.1;
  constexpr double kHi = 1000.0;
  constexpr double kTol = 1e-9;
  double lo = std::max(kLo, nearest * (1.0 + 1e-9) + 1e-9);
  double hi = kHi;
  if (lo >= hi) throw NoSolution("pose depth extent exceeds the search bracket");

  const double m_lo = measure_at(lo);
  const double m_hi = measure_at(hi);
  if (!(m_lo >= target && m_hi <= target)) {
    throw NoSolution("target scale not bracketed by depths [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "] m");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (measure_at(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(measure_at(mid) - target) > kTol) {
    throw NoSolution("bisection did not reach the target scale");
  }
  return shift_pose(base, {0.0, 0.0, mid});
}

}  // namespace posebounds
