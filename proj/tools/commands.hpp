#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "posebounds/alignment_metrics.hpp"
#include "posebounds/data_io.hpp"

namespace posebounds::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kPartialFailure = 3,
};

/// Inclusive offset range lo:hi:step.
struct OffsetRange {
  double lo = -7.0;
  double hi = 7.0;
  double step = 0.5;

  /// lo + k * step for every k with value <= hi (within 1e-9 step).
  std::vector<double> values() const;
};

/// Parses "lo:hi:step". Returns nullopt on malformed input, step <= 0 or
/// lo > hi.
std::optional<OffsetRange> parse_range(const std::string& text);

struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> dataset;
  std::size_t synth_poses = 0;
  std::uint64_t seed = 0;
  SynthParams synth;
  std::optional<double> focal;  // overrides every dataset camera when set
  double target_scale = kDefaultTargetScale;
  OffsetRange range;
  ModelKind model = ModelKind::kNormTranslation;
  Protocol protocol = Protocol::kProtocol2;
  std::optional<std::filesystem::path> out;
  std::size_t jobs = 1;

  ConfigEcho echo() const;
};

/// Dataset from --dataset, or a synthetic one from --synth-poses/--seed.
PoseDataset resolve_dataset(const RunConfig& cfg);

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t pose_count = 0;
  std::size_t unplaced_poses = 0;   // failed place_at_target_scale
  std::size_t failed_evaluations = 0;  // (pose, offset) pairs that failed
  std::vector<double> skipped_offsets; // no pose could be evaluated
};

/// Translation sweep: center each pose, place it at the target scale, shift by
/// dx along X and evaluate the best-case estimate under the protocol.
SweepResult sweep_dx(const PoseDataset& dataset, const RunConfig& cfg);

/// Depth sweep: same placement, shift by dz along Z, renormalize the 2D scale
/// (rho) and evaluate the best-case scaling estimate.
SweepResult sweep_dz(const PoseDataset& dataset, const RunConfig& cfg);

struct RelaxedRow {
  double offset_m = 0.0;
  double bound_mpjpe_mm = 0.0;    // translation bound under the protocol
  double relaxed_mpjpe_mm = 0.0;  // un-shifted re-projection, no alignment
};

struct RelaxedResult {
  std::vector<RelaxedRow> rows;
  std::size_t pose_count = 0;
  std::size_t unplaced_poses = 0;
  std::size_t failed_evaluations = 0;
};

RelaxedResult relaxed_demo(const PoseDataset& dataset, const RunConfig& cfg);
std::string format_relaxed_csv(const std::vector<RelaxedRow>& rows);

BoundReport eval(const PoseDataset& dataset, const RunConfig& cfg);

/// Runs a full command (dataset resolution, computation, output files) and
/// returns the process exit code. Diagnostics go to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// Parses argv and runs. This is the whole `bounds` executable.
int main_entry(int argc, char** argv, std::ostream& log);

}  // namespace posebounds::cli
