#pragma once

#include <cmath>
#include <optional>

namespace echoslam::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Planar pose; theta is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

double point_segment_distance(const Vec2& p, const Segment& s);

// Distance along the ray from `origin` in unit direction `dir` to the
// segment, or nothing if the ray misses. Collinear overlap reports the
// nearest overlapping point.
std::optional<double> ray_segment_intersection(const Vec2& origin,
                                               const Vec2& dir,
                                               const Segment& s);

// Minimum distance from `origin` to the part of the segment that lies
// inside the angular wedge [center - half, center + half]. +infinity when
// the wedge sees none of the segment. Exact: the minimum over a convex
// wedge is attained at the perpendicular foot, a segment endpoint, or a
// wedge-boundary ray hit, and all of those are inspected.
double wedge_min_distance(const Vec2& origin, double center, double half,
                          const Segment& s);

}  // namespace echoslam::sim
