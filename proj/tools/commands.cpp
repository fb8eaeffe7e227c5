#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "posebounds/geometry.hpp"
#include "posebounds/normalized_bounds.hpp"
#include "posebounds/parallel.hpp"

namespace posebounds::cli {
namespace {

// A pose centered in X-Y and placed on the optical axis at the target scale.
struct PlacedPose {
  Pose3D pose;
  const Camera* camera = nullptr;
  double subject_limb_length = 0.0;
  bool ok = false;
};

std::vector<PlacedPose> place_all(const PoseDataset& ds, const RunConfig& cfg,
                                  std::size_t& failures) {
  struct Ref {
    const SubjectRecord* subject;
    const PoseSample* sample;
  };
  std::vector<Ref> refs;
  for (const auto& s : ds.subjects) {
    for (const auto& p : s.poses) refs.push_back({&s, &p});
  }
  std::vector<PlacedPose> placed(refs.size());
  const std::size_t root = ds.skeleton.root();
  parallel_for(refs.size(), cfg.jobs, [&](std::size_t i) {
    PlacedPose& out = placed[i];
    out.camera = &ds.cameras.at(refs[i].sample->camera);
    out.subject_limb_length = refs[i].subject->mean_limb_length;
    try {
      out.pose = place_at_target_scale(center_xy_at_root(refs[i].sample->pose, root),
                                       *out.camera, cfg.target_scale, root);
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });
  failures = 0;
  for (const auto& p : placed) failures += p.ok ? 0 : 1;
  return placed;
}

// Mean over poses of `per_pose` (meters), evaluated in parallel and merged in
// index order. Returns nullopt when no pose could be evaluated.
template <typename Fn>
std::optional<double> mean_over_poses(const std::vector<PlacedPose>& poses,
                                      std::size_t jobs, std::size_t& failures,
                                      Fn&& per_pose) {
  std::vector<double> values(poses.size(), 0.0);
  std::vector<char> ok(poses.size(), 0);
  parallel_for(poses.size(), jobs, [&](std::size_t i) {
    if (!poses[i].ok) return;
    try {
      values[i] = per_pose(poses[i]);
      ok[i] = 1;
    } catch (const Error&) {
      ok[i] = 0;
    }
  });
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (!poses[i].ok) continue;
    if (ok[i]) {
      sum += values[i];
      ++n;
    } else {
      ++failures;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string format_number(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void emit(const std::optional<std::filesystem::path>& out, const std::string& text) {
  if (out) {
    write_text_file(*out, text);
  } else {
    std::cout << text;
  }
}

int exit_for(std::size_t failures) {
  return failures > 0 ? kPartialFailure : kSuccess;
}

}  // namespace

std::vector<double> OffsetRange::values() const {
  std::vector<double> out;
  const double slack = 1e-9 * step;
  for (std::size_t k = 0;; ++k) {
    double v = lo + static_cast<double>(k) * step;
    if (v > hi + slack) break;
    if (std::abs(v) < slack) v = 0.0;
    out.push_back(v);
  }
  return out;
}

std::optional<OffsetRange> parse_range(const std::string& text) {
  std::istringstream in(text);
  OffsetRange r;
  char c1 = 0;
  char c2 = 0;
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':') {
    return std::nullopt;
  }
  in >> std::ws;
  if (!in.eof()) return std::nullopt;
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !std::isfinite(r.step) ||
      !(r.step > 0.0) || r.lo > r.hi) {
    return std::nullopt;
  }
  return r;
}

ConfigEcho RunConfig::echo() const {
  ConfigEcho e;
  e.emplace_back("command", command);
  if (dataset) {
    e.emplace_back("dataset", dataset->generic_string());
  } else {
    e.emplace_back("synth_poses", std::to_string(synth_poses));
    e.emplace_back("seed", std::to_string(seed));
    e.emplace_back("synth_planar", synth.planar ? "true" : "false");
    e.emplace_back("synth_lateral_m", format_number(synth.lateral));
  }
  e.emplace_back("focal", focal ? format_number(*focal) : "dataset");
  e.emplace_back("target_scale", format_number(target_scale));
  e.emplace_back("range", format_number(range.lo) + ":" + format_number(range.hi) +
                              ":" + format_number(range.step));
  e.emplace_back("model", std::string(to_string(model)));
  e.emplace_back("protocol", std::string(to_string(protocol)));
  return e;
}

PoseDataset resolve_dataset(const RunConfig& cfg) {
  PoseDataset ds;
  if (cfg.dataset) {
    ds = load_dataset(*cfg.dataset);
    if (cfg.focal) {
      for (auto& [id, cam] : ds.cameras) cam = Camera(*cfg.focal);
    }
  } else {
    if (cfg.synth_poses == 0) {
      throw ValidationError("either --dataset or --synth-poses is required");
    }
    SynthParams params = cfg.synth;
    params.focal = cfg.focal.value_or(1.0);
    ds = synth_dataset(cfg.synth_poses, cfg.seed, params);
  }
  return ds;
}

SweepResult sweep_dx(const PoseDataset& ds, const RunConfig& cfg) {
  SweepResult result;
  result.pose_count = ds.pose_count();
  const auto placed = place_all(ds, cfg, result.unplaced_poses);
  const Skeleton& sk = ds.skeleton;
  for (double dx : cfg.range.values()) {
    const auto mean = mean_over_poses(
        placed, cfg.jobs, result.failed_evaluations, [&](const PlacedPose& p) {
          const auto best = best_case_translation(p.pose, *p.camera, dx, 0.0, sk.root());
          return mpjpe(align(best.estimate, p.pose, sk, cfg.protocol,
                             p.subject_limb_length),
                       p.pose);
        });
    if (mean) {
      result.rows.push_back({dx, *mean * 1000.0});
    } else {
      result.skipped_offsets.push_back(dx);
    }
  }
  return result;
}

SweepResult sweep_dz(const PoseDataset& ds, const RunConfig& cfg) {
  SweepResult result;
  result.pose_count = ds.pose_count();
  const auto placed = place_all(ds, cfg, result.unplaced_poses);
  const Skeleton& sk = ds.skeleton;
  for (double dz : cfg.range.values()) {
    const auto mean = mean_over_poses(
        placed, cfg.jobs, result.failed_evaluations, [&](const PlacedPose& p) {
          const double rho =
              normalization_rho(p.pose, *p.camera, dz, cfg.target_scale, sk.root());
          const auto best = best_case_scaling(p.pose, *p.camera, dz, rho);
          return mpjpe(align(best.estimate, p.pose, sk, cfg.protocol,
                             p.subject_limb_length),
                       p.pose);
        });
    if (mean) {
      result.rows.push_back({dz, *mean * 1000.0});
    } else {
      result.skipped_offsets.push_back(dz);
    }
  }
  return result;
}

RelaxedResult relaxed_demo(const PoseDataset& ds, const RunConfig& cfg) {
  RelaxedResult result;
  result.pose_count = ds.pose_count();
  const auto placed = place_all(ds, cfg, result.unplaced_poses);
  const Skeleton& sk = ds.skeleton;
  for (double dx : cfg.range.values()) {
    const auto bound = mean_over_poses(
        placed, cfg.jobs, result.failed_evaluations, [&](const PlacedPose& p) {
          const auto best = best_case_translation(p.pose, *p.camera, dx, 0.0, sk.root());
          return mpjpe(align(best.estimate, p.pose, sk, cfg.protocol,
                             p.subject_limb_length),
                       p.pose);
        });
    const auto relaxed = mean_over_poses(
        placed, cfg.jobs, result.failed_evaluations, [&](const PlacedPose& p) {
          const Pose3D shifted = shift_pose(p.pose, {dx, 0.0, 0.0});
          const Pose2D observed = project_perspective(shifted, *p.camera);
          const auto depths = depths_of(shifted);
          return mpjpe(relaxed_reproject_exact(observed, depths, *p.camera), shifted);
        });
    if (bound && relaxed) {
      result.rows.push_back({dx, *bound * 1000.0, *relaxed * 1000.0});
    }
  }
  return result;
}

std::string format_relaxed_csv(const std::vector<RelaxedRow>& rows) {
  std::string out = "offset_m,bound_mpjpe_mm,relaxed_mpjpe_mm\n";
  for (const auto& r : rows) {
    out += format_number(r.offset_m) + "," + format_number(r.bound_mpjpe_mm) + "," +
           format_number(r.relaxed_mpjpe_mm) + "\n";
  }
  return out;
}

BoundReport eval(const PoseDataset& ds, const RunConfig& cfg) {
  BoundModel model;
  model.kind = cfg.model;
  model.target_scale = cfg.target_scale;
  return evaluate_bound(ds, model, {cfg.protocol, ds.skeleton.root()}, cfg.jobs);
}

int run(const RunConfig& cfg, std::ostream& log) {
  PoseDataset ds;
  try {
    ds = resolve_dataset(cfg);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kDataError;
  }

  try {
    if (cfg.command == "synth") {
      emit(cfg.out, dump_dataset(ds));
      return kSuccess;
    }
    if (cfg.command == "sweep-dx" || cfg.command == "sweep-dz") {
      const SweepResult r =
          cfg.command == "sweep-dx" ? sweep_dx(ds, cfg) : sweep_dz(ds, cfg);
      if (r.unplaced_poses == r.pose_count || r.rows.empty()) {
        log << "error: no pose could be evaluated\n";
        return kDataError;
      }
      emit(cfg.out, format_sweep_csv(r.rows));
      for (double off : r.skipped_offsets) {
        log << "warning: offset " << off << " m skipped (no valid pose)\n";
      }
      if (r.unplaced_poses) {
        log << "warning: " << r.unplaced_poses
            << " pose(s) could not be placed at the target scale\n";
      }
      if (r.failed_evaluations) {
        log << "warning: " << r.failed_evaluations
            << " pose evaluation(s) failed and were excluded\n";
      }
      return exit_for(r.unplaced_poses + r.failed_evaluations +
                      r.skipped_offsets.size());
    }
    if (cfg.command == "relaxed-demo") {
      const RelaxedResult r = relaxed_demo(ds, cfg);
      if (r.unplaced_poses == r.pose_count || r.rows.empty()) {
        log << "error: no pose could be evaluated\n";
        return kDataError;
      }
      emit(cfg.out, format_relaxed_csv(r.rows));
      return exit_for(r.unplaced_poses + r.failed_evaluations);
    }
    if (cfg.command == "eval") {
      const BoundReport report = eval(ds, cfg);
      if (report.evaluated == 0) {
        log << "error: every pose failed\n";
        return kDataError;
      }
      emit(cfg.out, format_report(report, ds.skeleton, cfg.echo()));
      if (report.failed) {
        log << "warning: " << report.failed << " pose(s) failed and were excluded\n";
      }
      return exit_for(report.failed);
    }
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kDataError;
  }
  log << "error: unknown command '" << cfg.command << "'\n";
  return kUsageError;
}

int main_entry(int argc, char** argv, std::ostream& log) {
  CLI::App app{"Lower-bound MPJPE of simplified projection models"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string dataset;
  std::string range = "-7:7:0.5";
  std::string model = "norm-translation";
  std::string protocol = "p2";
  std::string out;
  double focal = 0.0;

  const auto add_common = [&](CLI::App* sub, bool sweeps) {
    sub->add_option("--dataset", dataset, "Dataset file (JSON interchange format)");
    sub->add_option("--synth-poses", cfg.synth_poses, "Generate N synthetic poses");
    sub->add_option("--seed", cfg.seed, "Seed for synthetic poses");
    sub->add_flag("--planar", cfg.synth.planar,
                  "Synthetic poses lie on a plane parallel to the image plane");
    sub->add_option("--lateral", cfg.synth.lateral,
                    "Synthetic root X/Y offset band in meters")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--f", focal, "Focal length (overrides dataset cameras)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--target-scale", cfg.target_scale,
                    "2D target scale (mean root-to-joint distance)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--protocol", protocol, "none | p2 | procrustes");
    sub->add_option("--out", out, "Output file (stdout if omitted)");
    sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    if (sweeps) sub->add_option("--range", range, "Offsets lo:hi:step in meters");
  };

  CLI::App* dx = app.add_subcommand("sweep-dx", "Translation-normalization sweep over dx");
  CLI::App* dz = app.add_subcommand("sweep-dz", "Scale-normalization sweep over dz");
  CLI::App* ev = app.add_subcommand("eval", "Dataset-level lower bound report");
  CLI::App* sy = app.add_subcommand("synth", "Write a synthetic dataset");
  CLI::App* rd = app.add_subcommand("relaxed-demo", "Bound vs relaxed re-projection over dx");
  add_common(dx, true);
  add_common(dz, true);
  add_common(ev, false);
  add_common(sy, false);
  add_common(rd, true);
  ev->add_option("--model", model, "norm-translation | norm-scaling | weak");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, log);
    return code == 0 ? kSuccess : kUsageError;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!dataset.empty()) cfg.dataset = dataset;
  if (!out.empty()) cfg.out = out;
  if (focal > 0.0) cfg.focal = focal;

  const auto r = parse_range(range);
  if (!r) {
    log << "error: --range must be lo:hi:step with lo <= hi and step > 0\n";
    return kUsageError;
  }
  cfg.range = *r;
  const auto m = parse_model(model);
  if (!m) {
    log << "error: unknown --model '" << model << "'\n";
    return kUsageError;
  }
  cfg.model = *m;
  const auto p = parse_protocol(protocol);
  if (!p) {
    log << "error: unknown --protocol '" << protocol << "'\n";
    return kUsageError;
  }
  cfg.protocol = *p;
  if (!cfg.dataset && cfg.synth_poses == 0) {
    log << "error: either --dataset or --synth-poses is required\n";
    return kUsageError;
  }
  if (cfg.command == "synth" && cfg.dataset) {
    log << "error: synth does not take --dataset\n";
    return kUsageError;
  }
  return run(cfg, log);
}

}  // namespace posebounds::cli
