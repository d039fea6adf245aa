#include "echoslam/sim/world.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "echoslam/errors.hpp"

namespace echoslam::sim {

WorldModel WorldModel::from_segments(std::vector<Segment> segments) {
  WorldModel w;
  bool first = true;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const double coords[4] = {s.a.x, s.a.y, s.b.x, s.b.y};
    for (double c : coords) {
      if (!std::isfinite(c)) {
        throw DataError("segment " + std::to_string(i) +
                        " has a non-finite coordinate");
      }
    }
    if (norm(s.b - s.a) < 1e-9) {
      throw DataError("segment " + std::to_string(i) + " is degenerate");
    }
    if (first) {
      w.bounds_ = {std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y),
                   std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)};
      first = false;
    } else {
      w.bounds_.xmin = std::min({w.bounds_.xmin, s.a.x, s.b.x});
      w.bounds_.ymin = std::min({w.bounds_.ymin, s.a.y, s.b.y});
      w.bounds_.xmax = std::max({w.bounds_.xmax, s.a.x, s.b.x});
      w.bounds_.ymax = std::max({w.bounds_.ymax, s.a.y, s.b.y});
    }
  }
  w.segments_ = std::move(segments);
  return w;
}

WorldModel WorldModel::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open world file: " + path);
  std::vector<Segment> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    double x1, y1, x2, y2;
    if (!(ls >> x1)) continue;  // blank or comment-only line
    if (!(ls >> y1 >> x2 >> y2)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected four numbers 'x1 y1 x2 y2'");
    }
    std::string extra;
    if (ls >> extra) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": trailing tokens after segment coordinates");
    }
    segments.push_back({{x1, y1}, {x2, y2}});
  }
  try {
    return from_segments(std::move(segments));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void WorldModel::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open world file for writing: " + path);
  os << "# world segments: x1 y1 x2 y2\n";
  char buf[160];
  for (const Segment& s : segments_) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %.9g\n", s.a.x, s.a.y,
                  s.b.x, s.b.y);
    os << buf;
  }
}

double WorldModel::clearance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : segments_) {
    best = std::min(best, point_segment_distance(p, s));
  }
  return best;
}

std::vector<Segment> make_box(double xmin, double ymin, double xmax,
                              double ymax) {
  return {
      {{xmin, ymin}, {xmax, ymin}},
      {{xmax, ymin}, {xmax, ymax}},
      {{xmax, ymax}, {xmin, ymax}},
      {{xmin, ymax}, {xmin, ymin}},
  };
}

}  // namespace echoslam::sim
