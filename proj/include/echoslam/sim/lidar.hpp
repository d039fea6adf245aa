#pragma once

#include <vector>

#include "echoslam/sim/world.hpp"

namespace echoslam::sim {

inline constexpr int kScanSize = 720;
inline constexpr double kScanStepRad = 0.008726646259971648;  // 0.5 degrees
inline constexpr double kLidarMaxRange = 8.0;

// One 360-degree range scan: beam i points along
// theta + i * 0.5 degrees, counter-clockwise, beam 0 on the robot heading.
struct Scan {
  double ts = 0.0;
  std::vector<double> ranges;  // kScanSize entries

  Scan() : ranges(kScanSize, 0.0) {}
};

// Noiseless reference scan; beams that hit nothing report kLidarMaxRange.
Scan simulate_lidar(const WorldModel& world, const Pose2& pose,
                    double ts = 0.0);

}  // namespace echoslam::sim
