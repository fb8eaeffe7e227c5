#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posebounds/dataset.hpp"
#include "posebounds/geometry.hpp"

namespace posebounds {

enum class Protocol { kNone, kProtocol2, kProcrustes };

std::string_view to_string(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view name) noexcept;

struct AlignmentConfig {
  Protocol protocol = Protocol::kProtocol2;
  std::size_t root = 0;
};

/// Mean Euclidean length over the skeleton's edges.
/// Throws DegeneratePose if every limb has zero length.
double mean_limb_length(const Pose3D& pose, const Skeleton& skeleton);

/// Protocol 2: scale the estimate about its root so its mean limb length is
/// `subject_limb_length`, then move its root onto the ground-truth root.
Pose3D protocol2_align(const Pose3D& estimate, const Pose3D& gt,
                       const Skeleton& skeleton, double subject_limb_length);

/// Similarity transform (rotation with det +1, isotropic scale, translation)
/// of `estimate` that minimizes the summed squared joint distance to `gt`.
Pose3D procrustes_align(const Pose3D& estimate, const Pose3D& gt);

/// Mean per-joint Euclidean distance. Throws SkeletonMismatch on size mismatch.
double mpjpe(const Pose3D& a, const Pose3D& b);

std::vector<double> per_joint_errors(const Pose3D& a, const Pose3D& b);

/// Applies the configured protocol to `estimate`.
Pose3D align(const Pose3D& estimate, const Pose3D& gt, const Skeleton& skeleton,
             Protocol protocol, double subject_limb_length);

enum class ModelKind { kNormTranslation, kNormScaling, kWeak };

std::string_view to_string(ModelKind m) noexcept;
std::optional<ModelKind> parse_model(std::string_view name) noexcept;

/// A simplified projection model plus the artificial offsets applied on top of
/// each pose's own position.
struct BoundModel {
  ModelKind kind = ModelKind::kNormTranslation;
  double dx = 0.0;  // added to the pose's own root X (translation model)
  double dy = 0.0;
  double dz = 0.0;  // scaling model
  double target_scale = kDefaultTargetScale;
};

struct PoseBound {
  std::string subject;
  std::size_t index = 0;  // pose index within the subject
  bool ok = false;
  double mpjpe = 0.0;  // meters, after alignment
  std::vector<double> per_joint_jpe;
  std::string error;  // set when !ok
};

struct SubjectBound {
  std::string id;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  double mean_limb_length = 0.0;
  double mpjpe = 0.0;  // mean over evaluated poses, meters
};

struct BoundReport {
  BoundModel model;
  AlignmentConfig alignment;
  std::vector<PoseBound> poses;  // ordered by (subject, pose index)
  std::vector<SubjectBound> subjects;
  std::vector<double> per_joint_mpjpe;  // mean per joint over evaluated poses
  double aggregate_mpjpe = 0.0;         // NaN if nothing was evaluated
  std::size_t evaluated = 0;
  std::size_t failed = 0;
};

/// Best-case estimate of one pose under `model`, aligned to its reference with
/// the configured protocol. Returns per-joint errors in meters.
///
/// Translation: the pose is centered in X-Y and shifted back by its own root
/// offset plus (dx, dy); the reference is the centered pose.
/// Scaling: rho normalizes the dz-shifted projection to the target scale; the
/// reference is the pose itself.
/// Weak: the reference is the X-Y centered pose.
std::vector<double> pose_bound(const Pose3D& pose, const Camera& cam,
                               const Skeleton& skeleton, const BoundModel& model,
                               Protocol protocol, double subject_limb_length);

/// Evaluates the bound over a whole dataset. Failing poses are recorded and
/// excluded; the run itself never aborts on a per-pose error. Results do not
/// depend on `jobs`.
BoundReport evaluate_bound(const PoseDataset& dataset, const BoundModel& model,
                           const AlignmentConfig& cfg, std::size_t jobs = 1);

}  // namespace posebounds
