#pragma once

#include <map>
#include <string>
#include <vector>

#include "posebounds/geometry.hpp"

namespace posebounds {

struct PoseSample {
  Pose3D pose;  // ground truth, camera frame, meters
  std::string camera;

  bool operator==(const PoseSample&) const = default;
};

struct SubjectRecord {
  std::string id;
  std::vector<PoseSample> poses;
  double mean_limb_length = 0.0;  // L_S, averaged over this subject's poses

  bool operator==(const SubjectRecord&) const = default;
};

struct PoseDataset {
  Skeleton skeleton;
  std::map<std::string, Camera> cameras;
  std::vector<SubjectRecord> subjects;

  std::size_t pose_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.poses.size();
    return n;
  }

  bool operator==(const PoseDataset&) const = default;
};

/// Builds a subject record and computes its L_S from the poses.
SubjectRecord make_subject(std::string id, std::vector<PoseSample> poses,
                           const Skeleton& skeleton);

/// Checks every dataset invariant: camera references, joint counts, positive
/// depths and the stored L_S values. Throws ValidationError naming the
/// offending subject, pose and joint.
void validate_dataset(const PoseDataset& dataset);

}  // namespace posebounds
