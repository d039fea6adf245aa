#include "echoslam/slam/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "echoslam/data/preintegrate.hpp"
#include "echoslam/errors.hpp"

namespace echoslam::slam {

void SlamOptions::validate() const {
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  if (map_every < 1) throw ConfigError("map_every must be at least 1");
}

namespace {

bool leaves_plane(const data::Transform3& rel) {
  constexpr double tol = 1e-6;
  return std::fabs(rel.t[2]) > tol || std::fabs(rel.R[2]) > tol ||
         std::fabs(rel.R[5]) > tol || std::fabs(rel.R[6]) > tol ||
         std::fabs(rel.R[7]) > tol || std::fabs(rel.R[8] - 1.0) > tol;
}

}  // namespace

SlamResult run_slam(const data::Dataset& ds, const scan::ScanNet& scan_net,
                    const odom::OdomNet& odom_net, const SlamOptions& opts) {
  opts.validate();
  if (ds.records.empty()) throw DataError("dataset has no records");
  const scan::ScanNetConfig& sc = scan_net.config();
  const odom::OdomNetConfig& oc = odom_net.config();
  if (oc.scan_size != sc.output_size) {
    throw ConfigError("odometry scan_size does not match the scan network");
  }
  if (oc.window != sc.window || oc.input_dim != sc.input_dim) {
    throw ConfigError("window shapes of the two networks do not match");
  }

  using clock = std::chrono::steady_clock;
  SlamResult res;
  res.grid = OccupancyGrid(opts.resolution);
  const double r_norm = ds.info.sensor.r_max;
  const double map_max =
      opts.use_reference_scans ? sim::kLidarMaxRange : sc.out_scale;
  res.map_max_range = map_max;

  scan::Window window =
      scan::Window::cold_start(ds.records[0].ultra, sc.window, r_norm);
  std::vector<double> prev_scan;

  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto t0 = clock::now();
    if (i > 0) window = scan::window_push(window, ds.records[i].ultra);
    std::vector<double> cur_scan = scan_net.predict(window);

    if (i == 0) {
      res.poses.push_back(ds.records[0].pose);
    } else {
      data::Transform3 rel;
      if (opts.use_reference_transforms) {
        rel = ds.records[i].rel;
      } else {
        bool fallback = false;
        rel = odom_net.predict(window, prev_scan, cur_scan, &fallback);
        if (fallback) ++res.rotation_fallbacks;
      }
      if (leaves_plane(rel)) ++res.planarity_violations;
      res.poses.push_back(data::apply_transform(res.poses.back(), rel));
    }

    if (static_cast<int>(i) % opts.map_every == 0) {
      const std::vector<double>& map_scan =
          opts.use_reference_scans ? ds.records[i].scan : cur_scan;
      res.grid.integrate_scan(res.poses[i], map_scan, map_max);
      res.map_frames.push_back(static_cast<int>(i));
      res.map_scans.push_back(map_scan);
    }

    prev_scan = std::move(cur_scan);
    res.frame_ms.push_back(
        std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  return res;
}

}  // namespace echoslam::slam
