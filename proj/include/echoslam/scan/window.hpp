#pragma once

#include <array>
#include <vector>

#include "echoslam/nn/tensor.hpp"
#include "echoslam/sim/sensors.hpp"

namespace echoslam::scan {

// Sliding window of the K most recent ultrasonic frames, rows ordered
// oldest to newest, ranges normalized by the sensor ceiling so entries sit
// in (0, 1]. Cold start replicates the first frame K times.
struct Window {
  int k = 3;
  double r_norm = 5.0;
  std::vector<double> values;  // k * kSensorCount, row-major

  static Window cold_start(const std::array<double, sim::kSensorCount>& frame,
                           int k, double r_norm);
};

Window window_push(const Window& w,
                   const std::array<double, sim::kSensorCount>& frame);

nn::Tensor window_tensor(const Window& w);

}  // namespace echoslam::scan
