#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "posebounds/alignment_metrics.hpp"
#include "posebounds/dataset.hpp"

namespace posebounds {

// ---------------------------------------------------------------------------
// Dataset interchange format (JSON, UTF-8). See docs/dataset_format.md.
// ---------------------------------------------------------------------------

/// Parses and fully validates a dataset document. ParseError carries the line
/// and column for syntax errors or the JSON path of a malformed field;
/// ValidationError names the violated invariant.
PoseDataset parse_dataset(const std::string& text);
PoseDataset load_dataset(const std::filesystem::path& path);

/// Serializes with round-trip exact doubles: parse_dataset(dump_dataset(d)) == d.
std::string dump_dataset(const PoseDataset& dataset);
void save_dataset(const PoseDataset& dataset, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic poses
// ---------------------------------------------------------------------------

struct SynthParams {
  double height = 1.7;          // ankle-to-head extent of the rest pose, m
  double depth_lo = 4.0;        // root depth band, m
  double depth_hi = 6.0;
  double lateral = 1.0;         // root X and Y drawn from [-lateral, lateral]
  double subject_scale = 0.08;  // per-subject size variation (+/- fraction)
  double focal = 1.0;
  bool planar = false;          // flatten every pose onto its root depth plane
  std::size_t poses_per_subject = 100;
};

/// The 15-joint skeleton used for synthetic data (14 body joints + pelvis
/// as root).
Skeleton synth_skeleton();

/// Deterministic for a fixed seed on every platform: each pose draws from its
/// own std::mt19937_64 stream seeded through std::seed_seq{seed, pose index},
/// and uniforms are formed from the top 53 bits of each 64-bit output.
PoseDataset synth_dataset(std::size_t n_poses, std::uint64_t seed,
                          const SynthParams& params = {});

// ---------------------------------------------------------------------------
// Sweep CSV: header `offset_m,mpjpe_mm`, LF line endings, %.12g values.
// ---------------------------------------------------------------------------

struct SweepRow {
  double offset_m = 0.0;
  double mpjpe_mm = 0.0;

  bool operator==(const SweepRow&) const = default;
};

std::string format_sweep_csv(const std::vector<SweepRow>& rows);
void save_sweep_csv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);
std::vector<SweepRow> load_sweep_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Bound report (JSON). Errors are converted to millimeters here.
// ---------------------------------------------------------------------------

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

std::string format_report(const BoundReport& report, const Skeleton& skeleton,
                          const ConfigEcho& config);
void save_report(const BoundReport& report, const Skeleton& skeleton,
                 const ConfigEcho& config, const std::filesystem::path& path);

/// Writes `contents` byte-for-byte. Throws IoError.
void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace posebounds
