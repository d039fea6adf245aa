#include "echoslam/cli/plot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "echoslam/errors.hpp"

namespace echoslam::cli {
namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr double kScale = 100.0;  // metres to centimetre pixels

void append_point(std::string& out, double x_m, double y_m, int radius) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "<circle cx=\"%.4f\" cy=\"%.4f\" r=\"%d\"/>\n",
                kScale * x_m, -kScale * y_m, radius);
  out += buf;
}

void append_scan_group(std::string& out, const char* id, const char* color,
                       const std::vector<double>& ranges) {
  out += "<g id=\"";
  out += id;
  out += "\" fill=\"";
  out += color;
  out += "\">\n";
  if (!ranges.empty()) {
    const double step = kTau / static_cast<double>(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const double a = step * static_cast<double>(i);
      append_point(out, ranges[i] * std::cos(a), ranges[i] * std::sin(a), 2);
    }
  }
  out += "</g>\n";
}

}  // namespace

void write_scan_plot_svg(const std::string& path, const sim::SensorSpec& spec,
                         const std::array<double, 12>& ultra,
                         const std::vector<double>& predicted,
                         const std::vector<double>& label) {
  spec.validate();
  std::string svg;
  svg +=
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-850 -850 1700 "
      "1700\" width=\"850\" height=\"850\">\n"
      "<rect x=\"-850\" y=\"-850\" width=\"1700\" height=\"1700\" "
      "fill=\"#ffffff\"/>\n"
      "<circle cx=\"0\" cy=\"0\" r=\"4\" fill=\"#000000\"/>\n";
  svg += "<g id=\"ultrasonic\" fill=\"#ff8c00\">\n";
  for (std::size_t s = 0; s < ultra.size(); ++s) {
    const double a = -spec.interval_rad * static_cast<double>(s);
    append_point(svg, ultra[s] * std::cos(a), ultra[s] * std::sin(a), 6);
  }
  svg += "</g>\n";
  append_scan_group(svg, "predicted", "#1f77b4", predicted);
  append_scan_group(svg, "label", "#2ca02c", label);
  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open svg file for writing: " + path);
  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!out) throw DataError("failed to write svg file: " + path);
}

}  // namespace echoslam::cli
