#include "echoslam/data/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "echoslam/errors.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::data {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSafetyMargin = 0.32;   // envelope offset beyond the disc
constexpr double kSpawnClearance = 0.6;  // required clearance for poses drawn
constexpr double kWaypointReached = 0.15;
constexpr int kWaypointTimeoutTicks = 750;  // 15 s
constexpr int kStalledTicks = 50;           // 1 s of near-zero speed

double yaw_limited(double cur, double des, double max_step) {
  // Move `cur` toward `des` along the segment between them.
  const double d = des - cur;
  const double step = std::clamp(d, -max_step, max_step);
  return cur + step;
}

sim::Vec2 vec_limited(const sim::Vec2& cur, const sim::Vec2& des,
                      double max_step) {
  // Convex step toward `des`: the result stays on the segment [cur, des],
  // so its norm never exceeds max(|cur|, |des|).
  const sim::Vec2 d = des - cur;
  const double n = norm(d);
  if (n <= max_step || n == 0.0) return des;
  return cur + d * (max_step / n);
}

}  // namespace

void KinematicLimits::validate() const {
  if (max_speed < 0 || max_accel <= 0 || max_ang_speed < 0 ||
      max_ang_accel <= 0) {
    throw ConfigError(
        "kinematic limits: speeds must be >= 0 and accelerations > 0");
  }
}

std::vector<TrajectorySample> sample_trajectory(const sim::WorldModel& world,
                                                const KinematicLimits& limits,
                                                double duration_s,
                                                std::uint64_t seed) {
  limits.validate();
  if (duration_s <= 0) throw ConfigError("duration must be positive");
  nn::Rng rng(seed);

  const sim::Bounds& bb = world.bounds();
  auto draw_point = [&](double margin) {
    return sim::Vec2{rng.uniform(bb.xmin + margin, bb.xmax - margin),
                     rng.uniform(bb.ymin + margin, bb.ymax - margin)};
  };
  auto draw_clear_point = [&](int tries, const char* what) {
    if (bb.xmax - bb.xmin < 2 * kSpawnClearance ||
        bb.ymax - bb.ymin < 2 * kSpawnClearance) {
      throw GenerationError(std::string("world too small to place ") + what);
    }
    for (int i = 0; i < tries; ++i) {
      const sim::Vec2 p = draw_point(kSpawnClearance);
      if (world.clearance(p) >= kSpawnClearance) return p;
    }
    throw GenerationError(std::string("no collision-free ") + what +
                          " found after " + std::to_string(tries) + " draws");
  };

  const sim::Vec2 start = draw_clear_point(1000, "start pose");
  const double start_theta = rng.uniform(-kPi, kPi);

  const double dt = 1.0 / kMocapHz;
  const int n_steps = static_cast<int>(std::lround(duration_s * kMocapHz));
  std::vector<TrajectorySample> out;
  out.reserve(n_steps + 1);

  if (limits.max_speed == 0.0) {
    for (int i = 0; i <= n_steps; ++i) {
      out.push_back({i * dt, {start.x, start.y, start_theta}});
    }
    return out;
  }

  sim::Vec2 p = start;
  sim::Vec2 v{0, 0};
  double theta = start_theta;
  double omega = 0.0;

  sim::Vec2 waypoint = draw_clear_point(1000, "waypoint");
  double heading_target = rng.uniform(-kPi, kPi);
  int ticks_on_waypoint = 0;
  int stalled_ticks = 0;

  auto clearance_gradient = [&world](const sim::Vec2& q) {
    const double h = 1e-4;
    return sim::Vec2{(world.clearance({q.x + h, q.y}) -
                      world.clearance({q.x - h, q.y})) /
                         (2.0 * h),
                     (world.clearance({q.x, q.y + h}) -
                      world.clearance({q.x, q.y - h})) /
                         (2.0 * h)};
  };

  out.push_back({0.0, {p.x, p.y, theta}});
  for (int i = 1; i <= n_steps; ++i) {
    sim::Vec2 to_wp = waypoint - p;
    if (norm(to_wp) < kWaypointReached ||
        ticks_on_waypoint > kWaypointTimeoutTicks ||
        stalled_ticks > kStalledTicks) {
      waypoint = draw_clear_point(1000, "waypoint");
      heading_target = rng.uniform(-kPi, kPi);
      ticks_on_waypoint = 0;
      stalled_ticks = 0;
      to_wp = waypoint - p;
    }
    ++ticks_on_waypoint;

    // Speed envelope: brake only the closing component so the disc stops at
    // the clearance margin while tangential and outward motion stay free
    // (an isotropic cap turns the margin into an absorbing parked state).
    // Also slow down into the waypoint.
    const double clear = world.clearance(p);
    const double cap = std::sqrt(
        2.0 * limits.max_accel * std::max(0.0, clear - kSafetyMargin));
    const double arrival =
        std::sqrt(2.0 * limits.max_accel * norm(to_wp)) + 1e-6;
    const double speed = std::min(limits.max_speed, arrival);
    const double d = norm(to_wp);
    sim::Vec2 v_des = d > 1e-12 ? to_wp * (speed / d) : sim::Vec2{0, 0};
    const sim::Vec2 g = clearance_gradient(p);
    if (norm(g) > 0.5) {
      const sim::Vec2 gn = g * (1.0 / norm(g));
      const double closing = -dot(v_des, gn);
      if (closing > cap) v_des = v_des + gn * (closing - cap);
    } else if (norm(v_des) > cap) {
      // Degenerate gradient (equidistant ridge): keep the old isotropic cap.
      v_des = v_des * (cap / norm(v_des));
    }
    v = vec_limited(v, v_des, limits.max_accel * dt);
    p = p + v * dt;
    if (norm(v) < 0.05 * limits.max_speed) {
      ++stalled_ticks;
    } else {
      stalled_ticks = 0;
    }

    if (world.clearance(p) < kRobotRadius) {
      throw GenerationError("trajectory safety envelope violated");
    }

    // Heading: rotate toward the target with both angular limits active.
    const double dpsi = sim::wrap_angle(heading_target - theta);
    const double w_mag =
        std::min({limits.max_ang_speed,
                  std::sqrt(2.0 * limits.max_ang_accel * std::fabs(dpsi)),
                  2.5 * std::fabs(dpsi)});
    const double w_des = dpsi >= 0 ? w_mag : -w_mag;
    omega = yaw_limited(omega, w_des, limits.max_ang_accel * dt);
    theta = sim::wrap_angle(theta + omega * dt);

    out.push_back({i * dt, {p.x, p.y, theta}});
  }
  return out;
}

}  // namespace echoslam::data
