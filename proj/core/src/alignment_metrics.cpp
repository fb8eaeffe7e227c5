#include "posebounds/alignment_metrics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "posebounds/normalized_bounds.hpp"
#include "posebounds/parallel.hpp"
#include "posebounds/weak_bounds.hpp"

namespace posebounds {

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::kNone: return "none";
    case Protocol::kProtocol2: return "p2";
    case Protocol::kProcrustes: return "procrustes";
  }
  return "unknown";
}

std::optional<Protocol> parse_protocol(std::string_view name) noexcept {
  if (name == "none") return Protocol::kNone;
  if (name == "p2" || name == "protocol2") return Protocol::kProtocol2;
  if (name == "procrustes") return Protocol::kProcrustes;
  return std::nullopt;
}

std::string_view to_string(ModelKind m) noexcept {
  switch (m) {
    case ModelKind::kNormTranslation: return "norm-translation";
    case ModelKind::kNormScaling: return "norm-scaling";
    case ModelKind::kWeak: return "weak";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) noexcept {
  if (name == "norm-translation") return ModelKind::kNormTranslation;
  if (name == "norm-scaling") return ModelKind::kNormScaling;
  if (name == "weak") return ModelKind::kWeak;
  return std::nullopt;
}

double mean_limb_length(const Pose3D& pose, const Skeleton& skeleton) {
  if (pose.size() != skeleton.size()) {
    throw SkeletonMismatch("pose joint count does not match the skeleton");
  }
  if (skeleton.edges().empty()) {
    throw DegeneratePose("skeleton has no limbs");
  }
  double sum = 0.0;
  for (const auto& [i, j] : skeleton.edges()) sum += (pose[i] - pose[j]).norm();
  const double mean = sum / static_cast<double>(skeleton.edges().size());
  if (!(mean > 0.0)) throw DegeneratePose("every limb has zero length");
  return mean;
}

Pose3D protocol2_align(const Pose3D& estimate, const Pose3D& gt,
                       const Skeleton& skeleton, double subject_limb_length) {
  if (estimate.size() != gt.size()) {
    throw SkeletonMismatch("estimate and ground truth differ in joint count");
  }
  const double alpha = subject_limb_length / mean_limb_length(estimate, skeleton);
  const std::size_t r = skeleton.root();
  const Vec3 est_root = estimate[r];
  const Vec3 gt_root = gt[r];
  Pose3D out = estimate;
  for (auto& j : out.joints) j = alpha * (j - est_root) + gt_root;
  return out;
}

Pose3D procrustes_align(const Pose3D& estimate, const Pose3D& gt) {
  const std::size_t n = estimate.size();
  if (n != gt.size()) {
    throw SkeletonMismatch("estimate and ground truth differ in joint count");
  }
  Eigen::Matrix3Xd src(3, n);
  Eigen::Matrix3Xd dst(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    src.col(static_cast<Eigen::Index>(i)) = estimate[i];
    dst.col(static_cast<Eigen::Index>(i)) = gt[i];
  }
  const auto centered_norm = [](const Eigen::Matrix3Xd& m) {
    return (m.colwise() - m.rowwise().mean()).norm();
  };
  if (n == 0 || !(centered_norm(src) > 0.0) || !(centered_norm(dst) > 0.0)) {
    throw DegeneratePose("Procrustes alignment needs poses with spatial extent");
  }

  // Umeyama's closed form; reflections are corrected to det(R) = +1.
  const Eigen::Matrix4d T = Eigen::umeyama(src, dst, true);
  const Eigen::Matrix3d sR = T.topLeftCorner<3, 3>();
  const Vec3 t = T.topRightCorner<3, 1>();

  Pose3D out;
  out.joints.reserve(n);
  for (const auto& j : estimate.joints) out.joints.push_back(sR * j + t);
  return out;
}

std::vector<double> per_joint_errors(const Pose3D& a, const Pose3D& b) {
  if (a.size() != b.size()) {
    throw SkeletonMismatch("poses differ in joint count (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
  }
  std::vector<double> err(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) err[i] = (a[i] - b[i]).norm();
  return err;
}

double mpjpe(const Pose3D& a, const Pose3D& b) {
  const auto err = per_joint_errors(a, b);
  if (err.empty()) return 0.0;
  double sum = 0.0;
  for (double e : err) sum += e;
  return sum / static_cast<double>(err.size());
}

Pose3D align(const Pose3D& estimate, const Pose3D& gt, const Skeleton& skeleton,
             Protocol protocol, double subject_limb_length) {
  switch (protocol) {
    case Protocol::kNone: return estimate;
    case Protocol::kProtocol2:
      return protocol2_align(estimate, gt, skeleton, subject_limb_length);
    case Protocol::kProcrustes: return procrustes_align(estimate, gt);
  }
  return estimate;
}

std::vector<double> pose_bound(const Pose3D& pose, const Camera& cam,
                               const Skeleton& skeleton, const BoundModel& model,
                               Protocol protocol, double subject_limb_length) {
  const std::size_t root = skeleton.root();
  if (pose.size() != skeleton.size()) {
    throw SkeletonMismatch("pose joint count does not match the skeleton");
  }
  Pose3D estimate;
  Pose3D reference;
  switch (model.kind) {
    case ModelKind::kNormTranslation: {
      reference = center_xy_at_root(pose, root);
      const double dx = pose[root].x() + model.dx;
      const double dy = pose[root].y() + model.dy;
      estimate = best_case_translation(reference, cam, dx, dy, root).estimate;
      break;
    }
    case ModelKind::kNormScaling: {
      reference = pose;
      const double rho =
          normalization_rho(pose, cam, model.dz, model.target_scale, root);
      estimate = best_case_scaling(pose, cam, model.dz, rho).estimate;
      break;
    }
    case ModelKind::kWeak: {
      WeakFit fit = best_case_weak(pose, cam, root);
      estimate = std::move(fit.estimate);
      reference = std::move(fit.centered_gt);
      break;
    }
  }
  return per_joint_errors(
      align(estimate, reference, skeleton, protocol, subject_limb_length),
      reference);
}

BoundReport evaluate_bound(const PoseDataset& dataset, const BoundModel& model,
                           const AlignmentConfig& cfg, std::size_t jobs) {
  if (cfg.root != dataset.skeleton.root()) {
    throw ValidationError("alignment root does not match the skeleton root");
  }

  BoundReport report;
  report.model = model;
  report.alignment = cfg;

  struct Job {
    const SubjectRecord* subject;
    std::size_t index;
  };
  std::vector<Job> work;
  for (const auto& s : dataset.subjects) {
    for (std::size_t i = 0; i < s.poses.size(); ++i) work.push_back({&s, i});
  }
  if (work.empty()) throw ValidationError("dataset has no poses");

  report.poses.resize(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t k) {
    const Job& job = work[k];
    const PoseSample& sample = job.subject->poses[job.index];
    PoseBound& out = report.poses[k];
    out.subject = job.subject->id;
    out.index = job.index;
    try {
      const auto cam_it = dataset.cameras.find(sample.camera);
      if (cam_it == dataset.cameras.end()) {
        throw ValidationError("unknown camera '" + sample.camera + "'");
      }
      out.per_joint_jpe =
          pose_bound(sample.pose, cam_it->second, dataset.skeleton, model,
                     cfg.protocol, job.subject->mean_limb_length);
      double sum = 0.0;
      for (double e : out.per_joint_jpe) sum += e;
      out.mpjpe = sum / static_cast<double>(out.per_joint_jpe.size());
      out.ok = true;
    } catch (const Error& e) {
      out.ok = false;
      out.error = e.what();
    }
  });

  // Sequential merge in (subject, pose) order keeps the sums reproducible.
  const std::size_t n_joints = dataset.skeleton.size();
  report.per_joint_mpjpe.assign(n_joints, 0.0);
  double total = 0.0;
  std::size_t k = 0;
  for (const auto& s : dataset.subjects) {
    SubjectBound sb;
    sb.id = s.id;
    sb.mean_limb_length = s.mean_limb_length;
    double subject_sum = 0.0;
    for (std::size_t i = 0; i < s.poses.size(); ++i, ++k) {
      const PoseBound& pb = report.poses[k];
      if (!pb.ok) {
        ++sb.failed;
        continue;
      }
      ++sb.evaluated;
      subject_sum += pb.mpjpe;
      for (std::size_t j = 0; j < n_joints; ++j) {
        report.per_joint_mpjpe[j] += pb.per_joint_jpe[j];
      }
    }
    sb.mpjpe = sb.evaluated ? subject_sum / static_cast<double>(sb.evaluated)
                            : std::numeric_limits<double>::quiet_NaN();
    total += subject_sum;
    report.evaluated += sb.evaluated;
    report.failed += sb.failed;
    report.subjects.push_back(std::move(sb));
  }

  if (report.evaluated > 0) {
    const double n = static_cast<double>(report.evaluated);
    report.aggregate_mpjpe = total / n;
    for (double& v : report.per_joint_mpjpe) v /= n;
  } else {
    report.aggregate_mpjpe = std::numeric_limits<double>::quiet_NaN();
    for (double& v : report.per_joint_mpjpe) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

}  // namespace posebounds
