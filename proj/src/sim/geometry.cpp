#include "echoslam/sim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace echoslam::sim {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kParallelEps = 1e-12;
}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
  const Vec2 v = s.b - s.a;
  const double len2 = dot(v, v);
  if (len2 < 1e-18) return norm(p - s.a);
  const double t = std::clamp(dot(p - s.a, v) / len2, 0.0, 1.0);
  return norm(p - (s.a + v * t));
}

std::optional<double> ray_segment_intersection(const Vec2& origin,
                                               const Vec2& dir,
                                               const Segment& s) {
  const Vec2 v = s.b - s.a;
  const Vec2 w = s.a - origin;
  const double denom = cross(dir, v);
  if (std::fabs(denom) < kParallelEps) {
    // Parallel; if collinear, the nearest overlapping point is an endpoint
    // projection (or the origin itself when inside the segment).
    if (std::fabs(cross(dir, w)) > kParallelEps) return std::nullopt;
    const double ta = dot(s.a - origin, dir);
    const double tb = dot(s.b - origin, dir);
    const double lo = std::min(ta, tb);
    const double hi = std::max(ta, tb);
    if (hi < 0.0) return std::nullopt;
    return std::max(lo, 0.0);
  }
  const double t = cross(w, v) / denom;
  const double u = cross(w, dir) / denom;
  if (t < -kParallelEps || u < -1e-9 || u > 1.0 + 1e-9) return std::nullopt;
  return std::max(t, 0.0);
}

double wedge_min_distance(const Vec2& origin, double center, double half,
                          const Segment& s) {
  double best = std::numeric_limits<double>::infinity();
  auto in_wedge = [&](const Vec2& p, double* out_dist) {
    const Vec2 d = p - origin;
    const double r = norm(d);
    *out_dist = r;
    if (r < 1e-12) return true;
    return std::fabs(wrap_angle(std::atan2(d.y, d.x) - center)) <= half;
  };

  const Vec2 v = s.b - s.a;
  const double len2 = dot(v, v);
  double dist = 0.0;

  // Perpendicular foot of the unconstrained line, when on the segment.
  if (len2 >= 1e-18) {
    const double t = dot(origin - s.a, v) / len2;
    if (t >= 0.0 && t <= 1.0) {
      const Vec2 p = s.a + v * t;
      if (in_wedge(p, &dist)) best = std::min(best, dist);
    }
  }

  // Segment endpoints.
  if (in_wedge(s.a, &dist)) best = std::min(best, dist);
  if (in_wedge(s.b, &dist)) best = std::min(best, dist);

  // Wedge boundary rays.
  for (const double a : {center - half, center + half}) {
    const auto t = ray_segment_intersection(origin, unit_from_angle(a), s);
    if (t) best = std::min(best, *t);
  }
  return best;
}

}  // namespace echoslam::sim
