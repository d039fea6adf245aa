#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "echoslam/sim/lidar.hpp"
#include "echoslam/sim/sensors.hpp"

namespace echoslam::data {

// Rigid transform with a 1x3 displacement and a row-major 3x3 rotation.
// Planar motion keeps t[2] = 0 and R a rotation about z.
struct Transform3 {
  std::array<double, 3> t{0.0, 0.0, 0.0};
  std::array<double, 9> R{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Transform3 identity() { return {}; }
  static Transform3 planar(double dx, double dy, double dyaw);

  double yaw() const;
  // Orthonormality and determinant +1, within `tol` per entry.
  bool is_rotation(double tol = 1e-6) const;
};

struct KinematicLimits {
  double max_speed = 0.8;      // m/s
  double max_accel = 1.5;      // m/s^2
  double max_ang_speed = 1.5;  // rad/s
  double max_ang_accel = 3.0;  // rad/s^2

  void validate() const;
};

struct TrajectorySample {
  double ts = 0.0;
  sim::Pose2 pose;
};

// One framework tick: ultrasonic frame, reference scan label, ground-truth
// pose, and the pre-integrated relative transform from the previous tick.
struct FrameRecord {
  double ts = 0.0;
  std::array<double, sim::kSensorCount> ultra{};
  std::vector<double> scan;
  sim::Pose2 pose;
  Transform3 rel;
};

struct DatasetInfo {
  int version = 1;
  std::string world_file;
  double sensor_hz = 3.0;
  double lidar_hz = 10.0;
  double mocap_hz = 50.0;
  double duration_s = 10.0;
  std::uint64_t seed = 0;
  sim::SensorSpec sensor;
  KinematicLimits limits;
};

struct Dataset {
  DatasetInfo info;
  std::vector<FrameRecord> records;
};

}  // namespace echoslam::data
