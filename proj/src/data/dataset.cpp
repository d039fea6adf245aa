#include "echoslam/data/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "echoslam/data/preintegrate.hpp"
#include "echoslam/errors.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::data {

namespace {

using nlohmann::json;

void append_num(std::string& s, double v, const char* fmt) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  s += buf;
}

// Full precision for quantities that feed pose math.
void append_exact(std::string& s, double v) { append_num(s, v, "%.17g"); }
// Compact form for range data.
void append_range(std::string& s, double v) { append_num(s, v, "%.9g"); }

double get_num(const json& j, const char* key, int line) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw DataError("line " + std::to_string(line) + ": missing numeric '" +
                    key + "'");
  }
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) {
    throw DataError("line " + std::to_string(line) + ": non-finite '" + key +
                    "'");
  }
  return v;
}

std::vector<double> get_array(const json& j, const char* key,
                              std::size_t expect, int line) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw DataError("line " + std::to_string(line) + ": missing array '" +
                    key + "'");
  }
  const auto& arr = j[key];
  if (arr.size() != expect) {
    throw DataError("line " + std::to_string(line) + ": '" + key + "' has " +
                    std::to_string(arr.size()) + " entries, expected " +
                    std::to_string(expect));
  }
  std::vector<double> out;
  out.reserve(expect);
  for (const auto& e : arr) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      throw DataError("line " + std::to_string(line) + ": '" + key +
                      "' has a non-numeric entry");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

Dataset assemble_dataset(const sim::WorldModel& world,
                         const std::vector<TrajectorySample>& samples,
                         DatasetInfo info) {
  info.sensor.validate();
  info.limits.validate();
  if (info.sensor_hz <= 0 || info.lidar_hz <= 0 || info.mocap_hz <= 0) {
    throw ConfigError("dataset rates must be positive");
  }
  if (samples.empty()) throw DataError("empty trajectory");
  info.duration_s = samples.back().ts;

  const auto sensor_idx = tick_sample_indices(samples, info.sensor_hz);
  const auto lidar_idx = tick_sample_indices(samples, info.lidar_hz);
  // Keep the noise stream distinct from the trajectory stream.
  nn::Rng noise_rng(info.seed ^ 0xA076BC97C1D8F4EEull);

  Dataset ds;
  ds.info = info;
  const int ticks = static_cast<int>(sensor_idx.size()) - 1;
  ds.records.reserve(ticks);
  sim::Pose2 prev_pose;
  for (int k = 1; k <= ticks; ++k) {
    const double tk = k / info.sensor_hz;
    const sim::Pose2 pose = samples[sensor_idx[k]].pose;

    FrameRecord rec;
    rec.ts = tk;
    rec.ultra = sense_array(world, pose, info.sensor, &noise_rng, tk).ranges;

    int j = static_cast<int>(std::lround(tk * info.lidar_hz));
    j = std::min<int>(j, static_cast<int>(lidar_idx.size()) - 1);
    rec.scan = simulate_lidar(world, samples[lidar_idx[j]].pose,
                              j / info.lidar_hz)
                   .ranges;

    rec.pose = pose;
    rec.rel = (k == 1) ? Transform3::identity()
                       : relative_transform(prev_pose, pose);
    prev_pose = pose;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open dataset for writing: " + path);

  std::string line;
  line.reserve(1 << 15);

  line += "{\"type\":\"header\",\"version\":";
  line += std::to_string(ds.info.version);
  line += ",\"world_file\":";
  line += json(ds.info.world_file).dump();
  line += ",\"sensor_hz\":";
  append_exact(line, ds.info.sensor_hz);
  line += ",\"lidar_hz\":";
  append_exact(line, ds.info.lidar_hz);
  line += ",\"mocap_hz\":";
  append_exact(line, ds.info.mocap_hz);
  line += ",\"duration_s\":";
  append_exact(line, ds.info.duration_s);
  line += ",\"seed\":";
  line += std::to_string(ds.info.seed);
  line += ",\"sensor\":{\"count\":";
  line += std::to_string(ds.info.sensor.count);
  line += ",\"interval_rad\":";
  append_exact(line, ds.info.sensor.interval_rad);
  line += ",\"fov_rad\":";
  append_exact(line, ds.info.sensor.fov_rad);
  line += ",\"r_min\":";
  append_exact(line, ds.info.sensor.r_min);
  line += ",\"r_max\":";
  append_exact(line, ds.info.sensor.r_max);
  line += ",\"noise_sigma\":";
  append_exact(line, ds.info.sensor.noise_sigma);
  line += "},\"limits\":{\"max_speed\":";
  append_exact(line, ds.info.limits.max_speed);
  line += ",\"max_accel\":";
  append_exact(line, ds.info.limits.max_accel);
  line += ",\"max_ang_speed\":";
  append_exact(line, ds.info.limits.max_ang_speed);
  line += ",\"max_ang_accel\":";
  append_exact(line, ds.info.limits.max_ang_accel);
  line += "}}\n";
  os << line;

  for (const FrameRecord& rec : ds.records) {
    line.clear();
    line += "{\"type\":\"record\",\"ts\":";
    append_exact(line, rec.ts);
    line += ",\"ultra\":[";
    for (int i = 0; i < sim::kSensorCount; ++i) {
      if (i) line += ",";
      append_range(line, rec.ultra[i]);
    }
    line += "],\"scan\":[";
    for (int i = 0; i < sim::kScanSize; ++i) {
      if (i) line += ",";
      append_range(line, rec.scan[i]);
    }
    line += "],\"pose\":{\"x\":";
    append_exact(line, rec.pose.x);
    line += ",\"y\":";
    append_exact(line, rec.pose.y);
    line += ",\"theta\":";
    append_exact(line, rec.pose.theta);
    line += "},\"rel\":{\"t\":[";
    for (int i = 0; i < 3; ++i) {
      if (i) line += ",";
      append_exact(line, rec.rel.t[i]);
    }
    line += "],\"R\":[";
    for (int i = 0; i < 9; ++i) {
      if (i) line += ",";
      append_exact(line, rec.rel.R[i]);
    }
    line += "]}}\n";
    os << line;
  }
  if (!os) throw DataError("failed writing dataset: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open dataset: " + path);

  Dataset ds;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  double prev_ts = -1.0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    const std::string type = j.value("type", "");
    if (!saw_header) {
      if (type != "header") {
        throw DataError(path + ": line " + std::to_string(line_no) +
                        ": expected the dataset header");
      }
      if (!j.contains("version") || !j["version"].is_number_integer() ||
          j["version"].get<int>() != 1) {
        throw DataError(path + ": unsupported dataset version");
      }
      ds.info.version = 1;
      ds.info.world_file = j.value("world_file", "");
      ds.info.sensor_hz = get_num(j, "sensor_hz", line_no);
      ds.info.lidar_hz = get_num(j, "lidar_hz", line_no);
      ds.info.mocap_hz = get_num(j, "mocap_hz", line_no);
      ds.info.duration_s = get_num(j, "duration_s", line_no);
      if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
        throw DataError(path + ": header missing unsigned 'seed'");
      }
      ds.info.seed = j["seed"].get<std::uint64_t>();
      if (!j.contains("sensor") || !j["sensor"].is_object() ||
          !j.contains("limits") || !j["limits"].is_object()) {
        throw DataError(path + ": header missing sensor/limits objects");
      }
      const json& sj = j["sensor"];
      ds.info.sensor.count = static_cast<int>(get_num(sj, "count", line_no));
      ds.info.sensor.interval_rad = get_num(sj, "interval_rad", line_no);
      ds.info.sensor.fov_rad = get_num(sj, "fov_rad", line_no);
      ds.info.sensor.r_min = get_num(sj, "r_min", line_no);
      ds.info.sensor.r_max = get_num(sj, "r_max", line_no);
      ds.info.sensor.noise_sigma = get_num(sj, "noise_sigma", line_no);
      try {
        ds.info.sensor.validate();
      } catch (const ConfigError& e) {
        throw DataError(path + ": header sensor spec invalid: " + e.what());
      }
      const json& lj = j["limits"];
      ds.info.limits.max_speed = get_num(lj, "max_speed", line_no);
      ds.info.limits.max_accel = get_num(lj, "max_accel", line_no);
      ds.info.limits.max_ang_speed = get_num(lj, "max_ang_speed", line_no);
      ds.info.limits.max_ang_accel = get_num(lj, "max_ang_accel", line_no);
      saw_header = true;
      continue;
    }
    if (type != "record") {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": expected a record object");
    }
    try {
      FrameRecord rec;
      rec.ts = get_num(j, "ts", line_no);
      if (rec.ts <= prev_ts) {
        throw DataError("line " + std::to_string(line_no) +
                        ": record timestamps must increase");
      }
      prev_ts = rec.ts;
      const auto ultra = get_array(j, "ultra", sim::kSensorCount, line_no);
      for (int i = 0; i < sim::kSensorCount; ++i) rec.ultra[i] = ultra[i];
      rec.scan = get_array(j, "scan", sim::kScanSize, line_no);
      if (!j.contains("pose") || !j["pose"].is_object()) {
        throw DataError("line " + std::to_string(line_no) + ": missing pose");
      }
      rec.pose.x = get_num(j["pose"], "x", line_no);
      rec.pose.y = get_num(j["pose"], "y", line_no);
      rec.pose.theta = get_num(j["pose"], "theta", line_no);
      if (!j.contains("rel") || !j["rel"].is_object()) {
        throw DataError("line " + std::to_string(line_no) + ": missing rel");
      }
      const auto t = get_array(j["rel"], "t", 3, line_no);
      const auto r = get_array(j["rel"], "R", 9, line_no);
      for (int i = 0; i < 3; ++i) rec.rel.t[i] = t[i];
      for (int i = 0; i < 9; ++i) rec.rel.R[i] = r[i];
      if (!rec.rel.is_rotation(1e-6)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": rel.R is not a rotation matrix");
      }
      ds.records.push_back(std::move(rec));
    } catch (const DataError& e) {
      // Prefix the file name once.
      const std::string msg = e.what();
      if (msg.rfind(path, 0) == 0) throw;
      throw DataError(path + ": " + msg);
    }
  }
  if (!saw_header) throw DataError(path + ": missing dataset header");
  return ds;
}

}  // namespace echoslam::data
