#pragma once

#include <string>
#include <vector>

#include "echoslam/data/types.hpp"
#include "echoslam/sim/world.hpp"

namespace echoslam::data {

// Builds the framework-rate record stream from a 50 Hz trajectory: one
// record per sensor tick k/sensor_hz (k >= 1) with the ultrasonic frame at
// the tick pose, the reference scan from the nearest lidar tick, the
// ground-truth pose, and the relative transform from the previous record
// (identity for the first record). info.duration_s is taken from the
// trajectory.
Dataset assemble_dataset(const sim::WorldModel& world,
                         const std::vector<TrajectorySample>& samples,
                         DatasetInfo info);

// JSON-lines serialization: a header object on the first line, then one
// record object per line. Writing is byte-deterministic for equal inputs.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace echoslam::data
