#include "echoslam/data/preintegrate.hpp"

#include <algorithm>
#include <cmath>

#include "echoslam/errors.hpp"

namespace echoslam::data {

Transform3 Transform3::planar(double dx, double dy, double dyaw) {
  Transform3 tr;
  tr.t = {dx, dy, 0.0};
  const double c = std::cos(dyaw), s = std::sin(dyaw);
  tr.R = {c, -s, 0, s, c, 0, 0, 0, 1};
  return tr;
}

double Transform3::yaw() const { return std::atan2(R[3], R[0]); }

bool Transform3::is_rotation(double tol) const {
  // R^T R == I entrywise and det(R) == +1.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += R[k * 3 + i] * R[k * 3 + j];
      const double expect = i == j ? 1.0 : 0.0;
      if (std::fabs(acc - expect) > tol) return false;
    }
  }
  const double det = R[0] * (R[4] * R[8] - R[5] * R[7]) -
                     R[1] * (R[3] * R[8] - R[5] * R[6]) +
                     R[2] * (R[3] * R[7] - R[4] * R[6]);
  return std::fabs(det - 1.0) <= tol;
}

Transform3 relative_transform(const sim::Pose2& a, const sim::Pose2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return Transform3::planar(c * dx + s * dy, -s * dx + c * dy,
                            sim::wrap_angle(b.theta - a.theta));
}

sim::Pose2 apply_transform(const sim::Pose2& pose, const Transform3& rel) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  sim::Pose2 out;
  out.x = pose.x + c * rel.t[0] - s * rel.t[1];
  out.y = pose.y + s * rel.t[0] + c * rel.t[1];
  out.theta = sim::wrap_angle(pose.theta + rel.yaw());
  return out;
}

std::vector<std::size_t> tick_sample_indices(
    const std::vector<TrajectorySample>& samples, double tick_hz) {
  if (samples.empty()) throw DataError("empty trajectory");
  if (tick_hz <= 0) throw ConfigError("tick rate must be positive");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].ts <= samples[i - 1].ts) {
      throw DataError("trajectory timestamps are not strictly increasing");
    }
  }
  const double duration = samples.back().ts;
  const int ticks = static_cast<int>(std::floor(duration * tick_hz + 1e-9));
  std::vector<std::size_t> idx(ticks + 1);
  std::size_t cursor = 0;
  for (int k = 0; k <= ticks; ++k) {
    const double tk = k / tick_hz;
    while (cursor + 1 < samples.size() &&
           std::fabs(samples[cursor + 1].ts - tk) <=
               std::fabs(samples[cursor].ts - tk)) {
      ++cursor;
    }
    if (std::fabs(samples[cursor].ts - tk) > 0.010 + 1e-9) {
      throw DataError("no trajectory sample within 10 ms of tick " +
                      std::to_string(k));
    }
    idx[k] = cursor;
  }
  return idx;
}

std::vector<Transform3> preintegrate(
    const std::vector<TrajectorySample>& samples, double tick_hz) {
  const auto idx = tick_sample_indices(samples, tick_hz);
  std::vector<Transform3> out;
  out.reserve(idx.size() > 0 ? idx.size() - 1 : 0);
  for (std::size_t k = 1; k < idx.size(); ++k) {
    out.push_back(
        relative_transform(samples[idx[k - 1]].pose, samples[idx[k]].pose));
  }
  return out;
}

}  // namespace echoslam::data
