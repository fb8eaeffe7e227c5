#include "posebounds/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace posebounds {
namespace {

using nlohmann::json;

constexpr const char* kDatasetFormat = "posebounds-dataset";
constexpr const char* kReportFormat = "posebounds-report";
constexpr int kFormatVersion = 1;

[[noreturn]] void field_error(const std::string& path, const std::string& msg) {
  throw ParseError("field " + path + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(path + "/" + key, "missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

std::size_t as_index(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) field_error(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array");
  return v;
}

Skeleton parse_skeleton(const json& j) {
  const std::string path = "/skeleton";
  std::vector<std::string> names;
  const json& jn = as_array(require(j, "joints", path), path + "/joints");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    names.push_back(as_string(jn[i], path + "/joints/" + std::to_string(i)));
  }
  const std::size_t root = as_index(require(j, "root", path), path + "/root");
  std::vector<Skeleton::Edge> edges;
  const json& je = as_array(require(j, "edges", path), path + "/edges");
  for (std::size_t k = 0; k < je.size(); ++k) {
    const std::string ep = path + "/edges/" + std::to_string(k);
    const json& e = as_array(je[k], ep);
    if (e.size() != 2) field_error(ep, "expected a pair of joint indices");
    edges.emplace_back(as_index(e[0], ep + "/0"), as_index(e[1], ep + "/1"));
  }
  return Skeleton(std::move(names), root, std::move(edges));
}

Pose3D parse_pose(const json& j, const std::string& path) {
  const json& arr = as_array(j, path);
  Pose3D pose;
  pose.joints.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string jp = path + "/" + std::to_string(i);
    const json& p = as_array(arr[i], jp);
    if (p.size() != 3) field_error(jp, "expected [X, Y, Z]");
    pose.joints.emplace_back(as_number(p[0], jp + "/0"), as_number(p[1], jp + "/1"),
                             as_number(p[2], jp + "/2"));
  }
  return pose;
}

std::string format_g12(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": invalid number '" +
                     std::string(s) + "'");
  }
  return v;
}

void validate_sweep(const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].offset_m) || !std::isfinite(rows[i].mpjpe_mm)) {
      throw ValidationError("sweep row " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(rows[i].offset_m > rows[i - 1].offset_m)) {
      throw ValidationError("sweep offsets must be strictly increasing (row " +
                            std::to_string(i) + ")");
    }
  }
}

double to_mm(double meters) { return meters * 1000.0; }

}  // namespace

// --- dataset invariants -----------------------------------------------------

SubjectRecord make_subject(std::string id, std::vector<PoseSample> poses,
                           const Skeleton& skeleton) {
  SubjectRecord s;
  s.id = std::move(id);
  s.poses = std::move(poses);
  if (s.poses.empty()) {
    throw ValidationError("subject '" + s.id + "' has no poses");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    try {
      sum += mean_limb_length(s.poses[i].pose, skeleton);
    } catch (const Error& e) {
      throw ValidationError("subject '" + s.id + "' pose " + std::to_string(i) +
                            ": " + e.what());
    }
  }
  s.mean_limb_length = sum / static_cast<double>(s.poses.size());
  return s;
}

namespace {

void validate_samples(const PoseDataset& ds, const std::string& subject_id,
                      const std::vector<PoseSample>& poses) {
  const std::size_t n = ds.skeleton.size();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const PoseSample& ps = poses[i];
    const std::string where =
        "subject '" + subject_id + "' pose " + std::to_string(i);
    if (!ds.cameras.contains(ps.camera)) {
      throw ValidationError(where + ": unknown camera id '" + ps.camera + "'");
    }
    if (ps.pose.size() != n) {
      throw ValidationError(where + ": has " + std::to_string(ps.pose.size()) +
                            " joints, skeleton has " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3& p = ps.pose[j];
      const std::string joint =
          "joint " + std::to_string(j) + " (" + ds.skeleton.joint_names()[j] + ")";
      if (!p.allFinite()) {
        throw ValidationError(where + ": " + joint + " has non-finite coordinates");
      }
      if (!(p.z() > 0.0)) {
        throw ValidationError(where + ": " + joint + " has non-positive depth");
      }
    }
  }
}

}  // namespace

void validate_dataset(const PoseDataset& ds) {
  if (ds.skeleton.size() == 0) throw ValidationError("dataset skeleton is empty");
  for (const auto& s : ds.subjects) {
    validate_samples(ds, s.id, s.poses);
    const SubjectRecord check = make_subject(s.id, s.poses, ds.skeleton);
    if (!(std::abs(check.mean_limb_length - s.mean_limb_length) <= 1e-12)) {
      throw ValidationError("subject '" + s.id +
                            "': stored mean limb length does not match poses");
    }
  }
}

// --- dataset documents ------------------------------------------------------

PoseDataset parse_dataset(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dataset is not valid JSON: ") + e.what());
  }

  const std::string format = as_string(require(doc, "format", ""), "/format");
  if (format != kDatasetFormat) {
    field_error("/format", "expected \"" + std::string(kDatasetFormat) + "\"");
  }
  if (as_index(require(doc, "version", ""), "/version") != kFormatVersion) {
    field_error("/version", "unsupported version");
  }

  PoseDataset ds;
  try {
    ds.skeleton = parse_skeleton(require(doc, "skeleton", ""));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("skeleton: ") + e.what());
  }

  const json& cams = require(doc, "cameras", "");
  if (!cams.is_object()) field_error("/cameras", "expected an object");
  for (const auto& [id, c] : cams.items()) {
    const std::string cp = "/cameras/" + id;
    const double focal = as_number(require(c, "focal", cp), cp + "/focal");
    try {
      ds.cameras.emplace(id, Camera(focal));
    } catch (const InvalidScale&) {
      throw ValidationError("camera '" + id + "': focal length must be positive");
    }
  }

  const json& subjects = as_array(require(doc, "subjects", ""), "/subjects");
  std::vector<std::vector<PoseSample>> samples(subjects.size());
  std::vector<std::string> ids(subjects.size());
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const std::string sp = "/subjects/" + std::to_string(s);
    ids[s] = as_string(require(subjects[s], "id", sp), sp + "/id");
    const json& poses = as_array(require(subjects[s], "poses", sp), sp + "/poses");
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const std::string pp = sp + "/poses/" + std::to_string(i);
      PoseSample sample;
      sample.camera = as_string(require(poses[i], "camera", pp), pp + "/camera");
      sample.pose = parse_pose(require(poses[i], "joints", pp), pp + "/joints");
      samples[s].push_back(std::move(sample));
    }
  }

  for (std::size_t s = 0; s < samples.size(); ++s) {
    validate_samples(ds, ids[s], samples[s]);
    ds.subjects.push_back(make_subject(ids[s], std::move(samples[s]), ds.skeleton));
  }
  validate_dataset(ds);
  return ds;
}

std::string dump_dataset(const PoseDataset& ds) {
  json doc;
  doc["format"] = kDatasetFormat;
  doc["version"] = kFormatVersion;
  doc["units"] = "meters";
  json sk;
  sk["joints"] = ds.skeleton.joint_names();
  sk["root"] = ds.skeleton.root();
  sk["edges"] = json::array();
  for (const auto& [i, j] : ds.skeleton.edges()) sk["edges"].push_back({i, j});
  doc["skeleton"] = std::move(sk);
  doc["cameras"] = json::object();
  for (const auto& [id, cam] : ds.cameras) doc["cameras"][id] = {{"focal", cam.focal()}};
  doc["subjects"] = json::array();
  for (const auto& s : ds.subjects) {
    json js;
    js["id"] = s.id;
    js["poses"] = json::array();
    for (const auto& ps : s.poses) {
      json joints = json::array();
      for (const auto& p : ps.pose.joints) joints.push_back({p.x(), p.y(), p.z()});
      js["poses"].push_back({{"camera", ps.camera}, {"joints", std::move(joints)}});
    }
    doc["subjects"].push_back(std::move(js));
  }
  return doc.dump(1) + "\n";
}

PoseDataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_text_file(path));
}

void save_dataset(const PoseDataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dump_dataset(dataset));
}

// --- sweep CSV --------------------------------------------------------------

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  validate_sweep(rows);
  std::string out = "offset_m,mpjpe_mm\n";
  for (const auto& r : rows) {
    out += format_g12(r.offset_m);
    out += ',';
    out += format_g12(r.mpjpe_mm);
    out += '\n';
  }
  return out;
}

void save_sweep_csv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path) {
  write_text_file(path, format_sweep_csv(rows));
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "offset_m,mpjpe_mm") {
    throw ParseError("line 1: expected header 'offset_m,mpjpe_mm'");
  }
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two fields");
    }
    const std::string_view view(line);
    rows.push_back({parse_double(view.substr(0, comma), line_no),
                    parse_double(view.substr(comma + 1), line_no)});
  }
  validate_sweep(rows);
  return rows;
}

std::vector<SweepRow> load_sweep_csv(const std::filesystem::path& path) {
  return parse_sweep_csv(read_text_file(path));
}

// --- reports ----------------------------------------------------------------

std::string format_report(const BoundReport& r, const Skeleton& skeleton,
                          const ConfigEcho& config) {
  json doc;
  doc["format"] = kReportFormat;
  doc["version"] = kFormatVersion;
  doc["model"] = std::string(to_string(r.model.kind));
  doc["protocol"] = std::string(to_string(r.alignment.protocol));
  doc["units"] = "mm";
  doc["note"] =
      "Best-case (lower bound) errors. Subject limb lengths L_S are computed "
      "from the ground-truth poses of the evaluated data.";
  json cfg = json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  doc["config"] = std::move(cfg);
  doc["model_params"] = {{"dx_m", r.model.dx},
                         {"dy_m", r.model.dy},
                         {"dz_m", r.model.dz},
                         {"target_scale", r.model.target_scale}};
  doc["aggregate_mpjpe_mm"] = to_mm(r.aggregate_mpjpe);
  doc["evaluated_poses"] = r.evaluated;
  doc["failed_poses"] = r.failed;

  doc["subjects"] = json::array();
  for (const auto& s : r.subjects) {
    doc["subjects"].push_back({{"id", s.id},
                               {"evaluated", s.evaluated},
                               {"failed", s.failed},
                               {"mean_limb_length_m", s.mean_limb_length},
                               {"mpjpe_mm", to_mm(s.mpjpe)}});
  }
  doc["per_joint_mpjpe_mm"] = json::array();
  for (std::size_t j = 0; j < r.per_joint_mpjpe.size(); ++j) {
    const std::string name =
        j < skeleton.size() ? skeleton.joint_names()[j] : std::to_string(j);
    doc["per_joint_mpjpe_mm"].push_back(
        {{"joint", name}, {"mpjpe_mm", to_mm(r.per_joint_mpjpe[j])}});
  }
  doc["failures"] = json::array();
  for (const auto& p : r.poses) {
    if (!p.ok) {
      doc["failures"].push_back(
          {{"subject", p.subject}, {"pose", p.index}, {"error", p.error}});
    }
  }
  return doc.dump(2) + "\n";
}

void save_report(const BoundReport& report, const Skeleton& skeleton,
                 const ConfigEcho& config, const std::filesystem::path& path) {
  write_text_file(path, format_report(report, skeleton, config));
}

// --- files ------------------------------------------------------------------

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace posebounds
