#pragma once

#include <string>
#include <vector>

#include "echoslam/sim/geometry.hpp"

namespace echoslam::sim {

struct Bounds {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
};

// Immutable collection of wall segments. Worlds load from a plain text
// format: one "x1 y1 x2 y2" line per segment, '#' starts a comment, blank
// lines are ignored.
class WorldModel {
 public:
  WorldModel() = default;

  static WorldModel from_segments(std::vector<Segment> segments);
  static WorldModel load(const std::string& path);
  void save(const std::string& path) const;

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  const Bounds& bounds() const { return bounds_; }

  // Distance from a point to the nearest wall; +infinity in an empty world.
  double clearance(const Vec2& p) const;

 private:
  std::vector<Segment> segments_;
  Bounds bounds_;
};

// Axis-aligned rectangular room (four walls).
std::vector<Segment> make_box(double xmin, double ymin, double xmax,
                              double ymax);

}  // namespace echoslam::sim
