#pragma once

#include <vector>

#include "echoslam/data/types.hpp"

namespace echoslam::data {

// Relative transform taking the frame of pose `a` to pose `b`:
// t = Rz(-theta_a) * (p_b - p_a), R = Rz(theta_b - theta_a).
Transform3 relative_transform(const sim::Pose2& a, const sim::Pose2& b);

// Pose reached by applying `rel` in the frame of `pose`.
sim::Pose2 apply_transform(const sim::Pose2& pose, const Transform3& rel);

// Index of the trajectory sample nearest to each tick k/tick_hz,
// k = 0..floor(duration * tick_hz). Samples must be strictly increasing in
// time and every tick must have a sample within 10 ms, else DataError.
std::vector<std::size_t> tick_sample_indices(
    const std::vector<TrajectorySample>& samples, double tick_hz);

// Relative transforms between consecutive ticks at `tick_hz`, one per tick
// k >= 1. Chaining them from the first tick pose reproduces the trajectory.
std::vector<Transform3> preintegrate(
    const std::vector<TrajectorySample>& samples, double tick_hz);

}  // namespace echoslam::data
