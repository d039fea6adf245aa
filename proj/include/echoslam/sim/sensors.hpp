#pragma once

#include <array>
#include <optional>

#include "echoslam/sim/world.hpp"

namespace echoslam::nn {
class Rng;
}

namespace echoslam::sim {

inline constexpr int kSensorCount = 12;

// Ring of first-echo ultrasonic sensors. Sensors are numbered 1..count in
// the clockwise direction: sensor 1 looks along the robot heading, sensor
// s along heading - (s-1)*interval.
struct SensorSpec {
  int count = kSensorCount;
  double interval_rad = 0.5235987755982988;  // 30 degrees
  double fov_rad = 1.1344640137963142;       // 65 degrees
  double r_min = 0.5;
  double r_max = 5.0;
  double noise_sigma = 0.01;

  double sensor_heading(int sensor, double robot_theta) const;
  void validate() const;
};

struct SensorFrame {
  double ts = 0.0;
  std::array<double, kSensorCount> ranges{};
};

// Distance reported by a unit ray cast: nearest wall hit along the ray, or
// nothing on a miss. `dir` must be a unit vector.
std::optional<double> ray_cast(const WorldModel& world, const Vec2& origin,
                               const Vec2& dir);

// First-echo reading of one cone sensor (1-based index). The echo distance
// is the minimum wall distance inside the sensor's angular wedge; Gaussian
// noise is added before clamping into [r_min, r_max]. When nothing echoes
// within r_max the reading is exactly r_max and carries no noise. Pass
// rng = nullptr for a noiseless reading (the draw still happens when an rng
// is supplied, whether or not an echo exists, to keep streams aligned).
double cone_first_echo(const WorldModel& world, const Pose2& pose, int sensor,
                       const SensorSpec& spec, nn::Rng* rng);

SensorFrame sense_array(const WorldModel& world, const Pose2& pose,
                        const SensorSpec& spec, nn::Rng* rng, double ts = 0.0);

// Smallest clockwise rotation (degrees, 0.1 resolution) that changes any
// noiseless reading by more than 1 cm; 360 when the sweep never changes.
double angular_response_deg(const WorldModel& world, const Pose2& pose,
                            const SensorSpec& spec);

}  // namespace echoslam::sim
