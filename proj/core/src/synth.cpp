#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "posebounds/data_io.hpp"

namespace posebounds {
namespace {

constexpr std::size_t kJoints = 15;

// Parent of each joint (root has itself as parent) and its rest offset from
// the parent in a body frame with +y up, before height normalization.
constexpr std::array<std::size_t, kJoints> kParent = {0, 0, 1, 2, 0, 4, 5, 0,
                                                      7, 7, 9, 10, 7, 12, 13};
const std::array<Vec3, kJoints> kRestOffset = {
    Vec3(0.0, 0.0, 0.0),     // pelvis
    Vec3(-0.12, 0.0, 0.0),   // r_hip
    Vec3(0.0, -0.44, 0.0),   // r_knee
    Vec3(0.0, -0.43, 0.0),   // r_ankle
    Vec3(0.12, 0.0, 0.0),    // l_hip
    Vec3(0.0, -0.44, 0.0),   // l_knee
    Vec3(0.0, -0.43, 0.0),   // l_ankle
    Vec3(0.0, 0.52, 0.0),    // neck
    Vec3(0.0, 0.22, 0.0),    // head
    Vec3(0.17, -0.03, 0.0),  // l_shoulder
    Vec3(0.0, -0.28, 0.0),   // l_elbow
    Vec3(0.0, -0.25, 0.0),   // l_wrist
    Vec3(-0.17, -0.03, 0.0), // r_shoulder
    Vec3(0.0, -0.28, 0.0),   // r_elbow
    Vec3(0.0, -0.25, 0.0),   // r_wrist
};
// Maximum articulation angle per joint, radians.
constexpr std::array<double, kJoints> kMaxAngle = {
    0.0, 0.3, 1.0, 1.0, 0.3, 1.0, 1.0, 0.35, 0.4, 0.3, 1.3, 1.0, 0.3, 1.3, 1.0};

class Uniform {
 public:
  explicit Uniform(std::seed_seq& seq) : engine_(seq) {}
  // Top 53 bits of one 64-bit draw; identical on every conforming platform.
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 engine_;
};

std::seed_seq make_seq(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32), stream,
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32)};
}

Eigen::Matrix3d random_rotation(Uniform& u, double max_angle) {
  const double z = u(-1.0, 1.0);
  const double phi = u(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vec3 axis(r * std::cos(phi), r * std::sin(phi), z);
  return Eigen::AngleAxisd(u(0.0, max_angle), axis).toRotationMatrix();
}

double rest_height() {
  std::array<Vec3, kJoints> p;
  p[0] = Vec3::Zero();
  for (std::size_t j = 1; j < kJoints; ++j) p[j] = p[kParent[j]] + kRestOffset[j];
  double lo = p[0].y(), hi = p[0].y();
  for (const auto& q : p) {
    lo = std::min(lo, q.y());
    hi = std::max(hi, q.y());
  }
  return hi - lo;
}

Pose3D synth_pose(Uniform& u, double body_scale, const SynthParams& params) {
  const double yaw = u(-std::numbers::pi, std::numbers::pi);
  const Eigen::Matrix3d global =
      Eigen::AngleAxisd(yaw, Vec3::UnitY()).toRotationMatrix() *
      random_rotation(u, 0.15);

  std::array<Eigen::Matrix3d, kJoints> world;
  std::array<Vec3, kJoints> body;
  world[0] = global;
  body[0] = Vec3::Zero();
  for (std::size_t j = 1; j < kJoints; ++j) {
    world[j] = world[kParent[j]] * random_rotation(u, kMaxAngle[j]);
    body[j] = body[kParent[j]] + body_scale * (world[j] * kRestOffset[j]);
  }

  const Vec3 root(u(-params.lateral, params.lateral),
                  u(-params.lateral, params.lateral),
                  u(params.depth_lo, params.depth_hi));
  Pose3D pose;
  pose.joints.reserve(kJoints);
  for (const auto& b : body) {
    // Body +y is up; camera +Y points down the image.
    Vec3 cam(b.x(), -b.y(), b.z());
    if (params.planar) cam.z() = 0.0;
    pose.joints.push_back(root + cam);
  }
  return pose;
}

}  // namespace

Skeleton synth_skeleton() {
  std::vector<std::string> names = {
      "pelvis",     "r_hip",   "r_knee",  "r_ankle",    "l_hip",
      "l_knee",     "l_ankle", "neck",    "head",       "l_shoulder",
      "l_elbow",    "l_wrist", "r_shoulder", "r_elbow", "r_wrist"};
  std::vector<Skeleton::Edge> edges;
  for (std::size_t j = 1; j < kJoints; ++j) edges.emplace_back(kParent[j], j);
  return Skeleton(std::move(names), 0, std::move(edges));
}

PoseDataset synth_dataset(std::size_t n_poses, std::uint64_t seed,
                          const SynthParams& params) {
  if (n_poses == 0) throw ValidationError("synthetic dataset needs at least one pose");
  if (params.poses_per_subject == 0) {
    throw ValidationError("poses_per_subject must be positive");
  }
  if (!(params.depth_lo > 0.0) || !(params.depth_hi >= params.depth_lo)) {
    throw ValidationError("synthetic depth band must be positive and ordered");
  }
  if (!(params.height > 0.0) || params.lateral < 0.0 || params.subject_scale < 0.0 ||
      params.subject_scale >= 1.0) {
    throw ValidationError("invalid synthetic pose parameters");
  }

  PoseDataset ds;
  ds.skeleton = synth_skeleton();
  ds.cameras.emplace("synth", Camera(params.focal));

  const double height_scale = params.height / rest_height();
  const std::size_t n_subjects =
      (n_poses + params.poses_per_subject - 1) / params.poses_per_subject;
  for (std::size_t s = 0; s < n_subjects; ++s) {
    auto subject_seq = make_seq(seed, 1, s);
    Uniform subject_rng(subject_seq);
    const double body_scale =
        height_scale * (1.0 + params.subject_scale * subject_rng(-1.0, 1.0));

    std::vector<PoseSample> poses;
    const std::size_t first = s * params.poses_per_subject;
    const std::size_t last = std::min(n_poses, first + params.poses_per_subject);
    for (std::size_t i = first; i < last; ++i) {
      auto pose_seq = make_seq(seed, 0, i);
      Uniform rng(pose_seq);
      poses.push_back({synth_pose(rng, body_scale, params), "synth"});
    }
    char id[32];
    std::snprintf(id, sizeof id, "SYN%04zu", s + 1);
    ds.subjects.push_back(make_subject(id, std::move(poses), ds.skeleton));
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace posebounds
