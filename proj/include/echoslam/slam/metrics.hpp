#pragma once

#include <vector>

#include "echoslam/sim/geometry.hpp"

namespace echoslam::slam {

// Frame-to-frame odometry quality against ground truth. A frame passes
// when its relative motion error is within both thresholds at once.
struct OdometryScore {
  double pass_rate = 0.0;      // percent of relative motions within tolerance
  double ate_rmse = 0.0;       // root mean squared absolute position error
  double drift_percent = 0.0;  // final position error over ground-truth path
  double path_length = 0.0;    // ground-truth path length
  int frames = 0;              // relative motions scored
};

OdometryScore odometry_score(const std::vector<sim::Pose2>& estimated,
                             const std::vector<sim::Pose2>& ground_truth,
                             double translation_tol = 0.05,
                             double angle_tol_deg = 2.0);

}  // namespace echoslam::slam
