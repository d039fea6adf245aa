#include "echoslam/sim/lidar.hpp"

#include <algorithm>

#include "echoslam/sim/sensors.hpp"

namespace echoslam::sim {

Scan simulate_lidar(const WorldModel& world, const Pose2& pose, double ts) {
  Scan scan;
  scan.ts = ts;
  const Vec2 origin{pose.x, pose.y};
  for (int i = 0; i < kScanSize; ++i) {
    const double angle = pose.theta + i * kScanStepRad;
    const auto hit = ray_cast(world, origin, unit_from_angle(angle));
    scan.ranges[i] =
        hit ? std::min(*hit, kLidarMaxRange) : kLidarMaxRange;
  }
  return scan;
}

}  // namespace echoslam::sim
