#include "echoslam/sim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echoslam/errors.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::sim {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double SensorSpec::sensor_heading(int sensor, double robot_theta) const {
  if (sensor < 1 || sensor > count) {
    throw ConfigError("sensor index " + std::to_string(sensor) +
                      " out of range [1," + std::to_string(count) + "]");
  }
  return wrap_angle(robot_theta - (sensor - 1) * interval_rad);
}

void SensorSpec::validate() const {
  if (count <= 0) throw ConfigError("sensor count must be positive");
  if (std::fabs(count * interval_rad - 2.0 * kPi) > 1e-9) {
    throw ConfigError("sensor interval does not tile the full circle");
  }
  if (fov_rad <= interval_rad) {
    throw ConfigError("sensor field of view must exceed the interval");
  }
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ConfigError("sensor range bounds must satisfy 0 < r_min < r_max");
  }
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must not be negative");
}

std::optional<double> ray_cast(const WorldModel& world, const Vec2& origin,
                               const Vec2& dir) {
  const double n = norm(dir);
  if (std::fabs(n - 1.0) > 1e-9) {
    throw ConfigError("ray_cast: direction must be a unit vector");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : world.segments()) {
    const auto t = ray_segment_intersection(origin, dir, s);
    if (t && *t < best) best = *t;
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

double cone_first_echo(const WorldModel& world, const Pose2& pose, int sensor,
                       const SensorSpec& spec, nn::Rng* rng) {
  const double center = spec.sensor_heading(sensor, pose.theta);
  const double half = spec.fov_rad / 2.0;
  const Vec2 origin{pose.x, pose.y};
  double dist = std::numeric_limits<double>::infinity();
  for (const Segment& s : world.segments()) {
    dist = std::min(dist, wedge_min_distance(origin, center, half, s));
  }
  const double noise = rng ? spec.noise_sigma * rng->gaussian() : 0.0;
  if (dist > spec.r_max) return spec.r_max;  // no echo: exact sentinel
  return std::clamp(dist + noise, spec.r_min, spec.r_max);
}

SensorFrame sense_array(const WorldModel& world, const Pose2& pose,
                        const SensorSpec& spec, nn::Rng* rng, double ts) {
  if (spec.count != kSensorCount) {
    throw ConfigError("sense_array expects " + std::to_string(kSensorCount) +
                      " sensors, spec has " + std::to_string(spec.count));
  }
  SensorFrame frame;
  frame.ts = ts;
  for (int s = 1; s <= spec.count; ++s) {
    frame.ranges[s - 1] = cone_first_echo(world, pose, s, spec, rng);
  }
  return frame;
}

double angular_response_deg(const WorldModel& world, const Pose2& pose,
                            const SensorSpec& spec) {
  const SensorFrame base = sense_array(world, pose, spec, nullptr);
  bool any_echo = false;
  for (double r : base.ranges) {
    if (r < spec.r_max) any_echo = true;
  }
  if (!any_echo) {
    throw ConfigError("angular_response: no echoes at the base pose");
  }
  const double deg = kPi / 180.0;
  for (int step = 1; step <= 3600; ++step) {
    const double delta = 0.1 * step;
    // Clockwise probe rotation.
    Pose2 rotated = pose;
    rotated.theta = wrap_angle(pose.theta - delta * deg);
    const SensorFrame probe = sense_array(world, rotated, spec, nullptr);
    for (int i = 0; i < spec.count; ++i) {
      if (std::fabs(probe.ranges[i] - base.ranges[i]) > 0.01) {
        return delta;
      }
    }
  }
  return 360.0;
}

}  // namespace echoslam::sim
