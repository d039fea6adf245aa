#pragma once

#include <cstdint>
#include <vector>

#include "echoslam/data/types.hpp"
#include "echoslam/sim/world.hpp"

namespace echoslam::data {

inline constexpr double kMocapHz = 50.0;
inline constexpr double kRobotRadius = 0.25;

// Random-waypoint trajectory sampled at 50 Hz. The robot is a 0.25 m disc;
// poses keep at least that much wall clearance, and consecutive samples
// respect the velocity and acceleration limits. Throws GenerationError when
// no collision-free start pose exists after 1000 draws. A zero max_speed
// yields a static pose sequence.
std::vector<TrajectorySample> sample_trajectory(const sim::WorldModel& world,
                                                const KinematicLimits& limits,
                                                double duration_s,
                                                std::uint64_t seed);

}  // namespace echoslam::data
