#pragma once

#include <array>
#include <string>
#include <vector>

#include "echoslam/sim/sensors.hpp"

namespace echoslam::cli {

// Renders one frame as an SVG scatter plot in the robot frame: the twelve
// ultrasonic ranges (orange), the predicted dense scan (blue), and the
// reference scan (green), each in its own <g> element. Coordinates are in
// centimetres (metres * 100) with the y axis flipped for screen space and
// printed with four decimals, so they parse back to micrometre precision.
void write_scan_plot_svg(const std::string& path, const sim::SensorSpec& spec,
                         const std::array<double, 12>& ultra,
                         const std::vector<double>& predicted,
                         const std::vector<double>& label);

}  // namespace echoslam::cli
