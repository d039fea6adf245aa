#pragma once

#include <vector>

#include "echoslam/data/dataset.hpp"
#include "echoslam/odom/odom_net.hpp"
#include "echoslam/scan/scan_net.hpp"
#include "echoslam/slam/grid.hpp"

namespace echoslam::slam {

struct SlamOptions {
  double resolution = 0.05;
  int map_every = 3;  // integrate every n-th frame, starting with frame 0
  // When true the map uses the recorded reference scans instead of the
  // scan-network predictions (pose estimation still runs on predictions).
  bool use_reference_scans = false;
  // When true the pose chain uses the recorded pre-integrated transforms
  // instead of the odometry network. Combined with use_reference_scans this
  // gives the oracle run that isolates mapping from estimation errors.
  bool use_reference_transforms = false;

  void validate() const;
};

struct SlamResult {
  std::vector<sim::Pose2> poses;  // one per record; [0] anchors to truth
  OccupancyGrid grid{0.05};
  std::vector<int> map_frames;      // record indices that updated the map
  // Scan integrated at each map frame and the max range used, kept so a
  // reference grid can re-integrate the identical scans at other poses.
  std::vector<std::vector<double>> map_scans;
  double map_max_range = 0.0;
  std::vector<double> frame_ms;     // wall-clock per frame
  int rotation_fallbacks = 0;       // degenerate rotation head outputs
  int planarity_violations = 0;     // estimated motions leaving the plane
};

// Full loop: slide the ultrasonic window, predict the dense scan, estimate
// the relative motion against the previous frame's scan, chain poses, and
// integrate every map_every-th scan into the grid.
SlamResult run_slam(const data::Dataset& ds, const scan::ScanNet& scan_net,
                    const odom::OdomNet& odom_net, const SlamOptions& opts);

}  // namespace echoslam::slam
