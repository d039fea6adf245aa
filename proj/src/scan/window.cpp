#include "echoslam/scan/window.hpp"

#include <cmath>

#include "echoslam/errors.hpp"

namespace echoslam::scan {

namespace {

void check_frame(const std::array<double, sim::kSensorCount>& frame,
                 double r_norm) {
  for (double r : frame) {
    if (!std::isfinite(r) || r < 0.0 || r > r_norm + 1e-9) {
      throw DataError("ultrasonic range outside [0, r_max]");
    }
  }
}

}  // namespace

Window Window::cold_start(const std::array<double, sim::kSensorCount>& frame,
                          int k, double r_norm) {
  if (k <= 0) throw ConfigError("window length must be positive");
  if (r_norm <= 0) throw ConfigError("normalization ceiling must be positive");
  check_frame(frame, r_norm);
  Window w;
  w.k = k;
  w.r_norm = r_norm;
  w.values.resize(static_cast<std::size_t>(k) * sim::kSensorCount);
  for (int row = 0; row < k; ++row) {
    for (int i = 0; i < sim::kSensorCount; ++i) {
      w.values[row * sim::kSensorCount + i] = frame[i] / r_norm;
    }
  }
  return w;
}

Window window_push(const Window& w,
                   const std::array<double, sim::kSensorCount>& frame) {
  if (static_cast<int>(w.values.size()) != w.k * sim::kSensorCount) {
    throw ConfigError("window buffer size does not match its length");
  }
  check_frame(frame, w.r_norm);
  Window out = w;
  // Drop the oldest row, shift up, append the new frame normalized.
  for (int row = 0; row + 1 < w.k; ++row) {
    for (int i = 0; i < sim::kSensorCount; ++i) {
      out.values[row * sim::kSensorCount + i] =
          w.values[(row + 1) * sim::kSensorCount + i];
    }
  }
  for (int i = 0; i < sim::kSensorCount; ++i) {
    out.values[(w.k - 1) * sim::kSensorCount + i] = frame[i] / w.r_norm;
  }
  return out;
}

nn::Tensor window_tensor(const Window& w) {
  return nn::Tensor::from({w.k, sim::kSensorCount}, w.values);
}

}  // namespace echoslam::scan
