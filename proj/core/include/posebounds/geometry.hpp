#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "posebounds/error.hpp"

namespace posebounds {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Joint topology: names, the root (pelvis) index and the limb edge list.
/// The skeleton is data, not code; any connected tree or graph works.
class Skeleton {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Skeleton() = default;

  /// Validates the topology and throws ValidationError on out-of-range
  /// indices, self loops, duplicate edges or a disconnected edge graph.
  Skeleton(std::vector<std::string> joint_names, std::size_t root,
           std::vector<Edge> edges);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t root() const noexcept { return root_; }
  const std::vector<std::string>& joint_names() const noexcept { return names_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool operator==(const Skeleton&) const = default;

 private:
  std::vector<std::string> names_;
  std::size_t root_ = 0;
  std::vector<Edge> edges_;
};

/// 3D joint positions in the camera frame, meters. Camera at the origin,
/// looking down +Z.
struct Pose3D {
  std::vector<Vec3> joints;

  Pose3D() = default;
  explicit Pose3D(std::vector<Vec3> j) : joints(std::move(j)) {}

  std::size_t size() const noexcept { return joints.size(); }
  const Vec3& operator[](std::size_t i) const { return joints[i]; }
  Vec3& operator[](std::size_t i) { return joints[i]; }

  bool operator==(const Pose3D&) const = default;
};

/// 2D joint positions on the image plane, in focal-length units.
struct Pose2D {
  std::vector<Vec2> points;

  Pose2D() = default;
  explicit Pose2D(std::vector<Vec2> p) : points(std::move(p)) {}

  std::size_t size() const noexcept { return points.size(); }
  const Vec2& operator[](std::size_t i) const { return points[i]; }
  Vec2& operator[](std::size_t i) { return points[i]; }

  bool operator==(const Pose2D&) const = default;
};

/// Pure focal-length pinhole camera. No principal point, no distortion.
class Camera {
 public:
  /// Throws InvalidScale unless focal is positive and finite.
  explicit Camera(double focal = 1.0);
  double focal() const noexcept { return focal_; }
  bool operator==(const Camera&) const = default;

 private:
  double focal_;
};

struct ShiftVector {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
};

/// Default 2D target scale (mean root-to-joint distance on the image plane).
inline constexpr double kDefaultTargetScale = 0.1;

/// Perspective projection x = f X / Z, y = f Y / Z.
/// Throws NonPositiveDepth if any Z <= 0.
Pose2D project_perspective(const Pose3D& pose, const Camera& cam);

Pose3D shift_pose(const Pose3D& pose, const ShiftVector& d);

/// Translates all points so that the root point sits at the image origin.
Pose2D center_at_root(const Pose2D& p, std::size_t root);

/// Translates the pose so that the root joint has X = Y = 0. Depths are kept.
Pose3D center_xy_at_root(const Pose3D& pose, std::size_t root);

/// Mean Euclidean distance of the non-root points from the root point.
/// Throws DegeneratePose if that mean is zero.
double scale_measure(const Pose2D& p, std::size_t root);

/// Multiplies every coordinate by rho. Throws InvalidScale for rho <= 0 or
/// non-finite rho.
Pose2D rescale_pose(const Pose2D& p, double rho);

/// Inverse perspective projection with given per-joint depths:
/// (x Z / f, y Z / f, Z). Throws NonPositiveDepth for any depth <= 0 and
/// SkeletonMismatch if the array sizes differ.
Pose3D reproject(const Pose2D& p, std::span<const double> depths,
                 const Camera& cam);

/// Depth column of a pose.
std::vector<double> depths_of(const Pose3D& pose);

/// Moves the pose so its root lies on the optical axis at the depth where the
/// projected scale_measure equals `target`. The depth is found by bisection in
/// [0.1 m, 1000 m] (raised to keep every joint in front of the camera) with a
/// 1e-9 absolute tolerance on the measure. Throws NoSolution if the target is
/// not bracketed and DegeneratePose for poses without lateral extent.
Pose3D place_at_target_scale(const Pose3D& pose, const Camera& cam,
                             double target, std::size_t root);

}  // namespace posebounds
