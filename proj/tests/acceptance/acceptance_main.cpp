#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "echoslam/cli/cli.hpp"
#include "echoslam/data/dataset.hpp"
#include "echoslam/data/preintegrate.hpp"
#include "echoslam/data/trajectory.hpp"
#include "echoslam/nn/gradcheck.hpp"
#include "echoslam/nn/graph.hpp"
#include "echoslam/nn/layers.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/odom/odom_net.hpp"
#include "echoslam/odom/rotation.hpp"
#include "echoslam/odom/train.hpp"
#include "echoslam/scan/curvature.hpp"
#include "echoslam/scan/scan_net.hpp"
#include "echoslam/scan/train.hpp"
#include "echoslam/sim/lidar.hpp"
#include "echoslam/sim/sensors.hpp"
#include "echoslam/sim/world.hpp"
#include "echoslam/slam/grid.hpp"
#include "echoslam/slam/metrics.hpp"
#include "echoslam/slam/pipeline.hpp"

namespace es = echoslam;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = 3.14159265358979323846;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Reference fixture: 4 m x 4 m room with two box obstacles.
std::vector<es::sim::Segment> fixture_segments() {
  auto segs = es::sim::make_box(-2.0, -2.0, 2.0, 2.0);
  for (const auto& s : es::sim::make_box(0.7, 0.4, 1.1, 0.8)) segs.push_back(s);
  for (const auto& s : es::sim::make_box(-1.2, -1.0, -0.7, -0.6)) segs.push_back(s);
  return segs;
}

es::data::Dataset fixture_dataset(const es::sim::WorldModel& world, double duration,
                                  std::uint64_t seed) {
  auto samples = es::data::sample_trajectory(world, es::data::KinematicLimits{}, duration, seed);
  es::data::DatasetInfo info;
  info.world_file = "fixture";
  info.seed = seed;
  return es::data::assemble_dataset(world, samples, info);
}

// Shared state for the training-dependent checks (6, 7, 8).
struct Context {
  es::sim::WorldModel world;
  std::optional<es::data::Dataset> train_ds;
  std::optional<es::scan::ScanNet> scan_net;
  std::optional<es::odom::OdomNet> odom_net;
  es::scan::ScanTrainResult scan_result;
  es::odom::OdomTrainResult overfit_result;
  std::size_t window_count = 0;
  double scan_seconds = 0.0;
  double overfit_seconds = 0.0;
  std::optional<es::data::Dataset> heldout_ds;
  std::optional<es::slam::SlamResult> slam_result;
  double overlap = 0.0;
  es::slam::OdometryScore score;

  Context() : world(es::sim::WorldModel::from_segments(fixture_segments())) {}

  void ensure_trained() {
    if (scan_net) return;

    train_ds = fixture_dataset(world, 1667.0, 11);
    auto windows = es::scan::dataset_windows(*train_ds, 3, train_ds->info.sensor.r_max);
    auto labels = es::scan::dataset_scan_labels(*train_ds);
    window_count = windows.size();

    es::scan::ScanNetConfig scan_cfg;
    scan_cfg.curvature_weight = 0.01;
    es::nn::Rng scan_rng(1);
    scan_net.emplace(scan_cfg, scan_rng);
    es::scan::ScanTrainConfig scan_train;
    scan_train.epochs = 20;
    scan_train.batch_size = 16;
    scan_train.lr = 2e-3;
    scan_train.seed = 1;
    auto start = Clock::now();
    scan_result = es::scan::train_scan(*scan_net, windows, labels, scan_train);
    scan_seconds = seconds_since(start);

    es::nn::Rng overfit_rng(2);
    es::odom::OdomNet overfit_net(es::odom::OdomNetConfig{}, overfit_rng);
    auto teacher = es::odom::odometry_samples(*train_ds, 3, train_ds->info.sensor.r_max);
    std::vector<es::odom::OdomSample> one{teacher[teacher.size() / 2]};
    es::odom::OdomTrainConfig overfit_cfg;
    overfit_cfg.epochs = 500;
    overfit_cfg.batch_size = 1;
    overfit_cfg.lr = 1e-3;
    overfit_cfg.seed = 2;
    overfit_cfg.early_stop_fraction = 0.009;
    start = Clock::now();
    overfit_result = es::odom::train_odom(overfit_net, one, overfit_cfg);
    overfit_seconds = seconds_since(start);
  }

  void ensure_slam() {
    if (slam_result) return;
    ensure_trained();

    auto odom_ds = fixture_dataset(world, 400.0, 21);
    auto student = es::odom::odometry_samples(odom_ds, *scan_net);
    es::nn::Rng odom_rng(3);
    odom_net.emplace(es::odom::OdomNetConfig{}, odom_rng);
    es::odom::OdomTrainConfig odom_train;
    odom_train.epochs = 4;
    odom_train.batch_size = 16;
    odom_train.lr = 1e-3;
    odom_train.seed = 3;
    es::odom::train_odom(*odom_net, student, odom_train);

    heldout_ds = fixture_dataset(world, 60.0, 101);
    es::slam::SlamOptions opts;
    opts.resolution = 0.1;
    opts.map_every = 3;
    slam_result = es::slam::run_slam(*heldout_ds, *scan_net, *odom_net, opts);

    es::slam::OccupancyGrid truth(opts.resolution);
    for (std::size_t i = 0; i < slam_result->map_frames.size(); ++i) {
      const int frame = slam_result->map_frames[i];
      const auto& rec = heldout_ds->records[static_cast<std::size_t>(frame)];
      truth.integrate_scan(rec.pose, slam_result->map_scans[i], slam_result->map_max_range);
    }
    overlap = es::slam::map_overlap(slam_result->grid, truth);

    std::vector<es::sim::Pose2> gt;
    for (const auto& rec : heldout_ds->records) gt.push_back(rec.pose);
    score = es::slam::odometry_score(slam_result->poses, gt);
  }
};

// -- criterion 1 -------------------------------------------------------------

es::sim::WorldModel random_convex_room(es::nn::Rng& rng, std::vector<std::array<double, 2>>* poly) {
  const int n = 16 + static_cast<int>(rng.uniform_int(9));
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    angles[static_cast<std::size_t>(i)] =
        (static_cast<double>(i) + 0.8 * rng.uniform()) * 2.0 * kPi / static_cast<double>(n);
  }
  const double ax = rng.uniform(2.5, 5.0);
  const double by = rng.uniform(2.5, 5.0);
  const double cx = rng.uniform(-0.5, 0.5);
  const double cy = rng.uniform(-0.5, 0.5);
  std::vector<es::sim::Segment> segs;
  poly->clear();
  for (int i = 0; i < n; ++i) {
    const double a = angles[static_cast<std::size_t>(i)];
    poly->push_back({cx + ax * std::cos(a), cy + by * std::sin(a)});
  }
  for (int i = 0; i < n; ++i) {
    const auto& a = (*poly)[static_cast<std::size_t>(i)];
    const auto& b = (*poly)[static_cast<std::size_t>((i + 1) % n)];
    segs.push_back({{a[0], a[1]}, {b[0], b[1]}});
  }
  return es::sim::WorldModel::from_segments(segs);
}

bool inside_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const bool crosses = (poly[i][1] > y) != (poly[j][1] > y);
    if (crosses) {
      const double t = (y - poly[i][1]) / (poly[j][1] - poly[i][1]);
      if (x < poly[i][0] + t * (poly[j][0] - poly[i][0])) in = !in;
    }
  }
  return in;
}

double fan_first_echo(const es::sim::WorldModel& world, const es::sim::Pose2& pose, int sensor,
                      const es::sim::SensorSpec& spec) {
  const double heading = spec.sensor_heading(sensor, pose.theta);
  const int rays = 651;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rays; ++i) {
    const double a = heading - spec.fov_rad / 2.0 +
                     spec.fov_rad * static_cast<double>(i) / static_cast<double>(rays - 1);
    auto d = es::sim::ray_cast(world, {pose.x, pose.y}, {std::cos(a), std::sin(a)});
    if (d && *d < best) best = *d;
  }
  if (!(best <= spec.r_max)) return spec.r_max;
  return std::max(best, spec.r_min);
}

Outcome criterion_cone_oracle(Context&) {
  const auto start = Clock::now();
  es::nn::Rng rng(401);
  es::sim::SensorSpec spec;
  double worst = 0.0;
  int cases = 0;
  std::vector<std::array<double, 2>> poly;
  while (cases < 200) {
    auto world = random_convex_room(rng, &poly);
    for (int trial = 0; trial < 10 && cases < 200; ++trial) {
      es::sim::Pose2 pose;
      pose.x = rng.uniform(-2.0, 2.0);
      pose.y = rng.uniform(-2.0, 2.0);
      pose.theta = rng.uniform(-kPi, kPi);
      if (!inside_polygon(poly, pose.x, pose.y)) continue;
      if (world.clearance({pose.x, pose.y}) < 0.6) continue;
      const int sensor = 1 + static_cast<int>(rng.uniform_int(12));
      const double analytic = es::sim::cone_first_echo(world, pose, sensor, spec, nullptr);
      const double fan = fan_first_echo(world, pose, sensor, spec);
      worst = std::max(worst, std::abs(analytic - fan));
      ++cases;
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = worst < 1e-3 && elapsed < 10.0;
  out.detail = fmt("%d cases, max |analytic - fan| = %.2e m, %.1f s", cases, worst, elapsed);
  return out;
}

// -- criterion 2 -------------------------------------------------------------

Outcome criterion_gradients(Context&) {
  double worst = 0.0;
  std::string worst_name = "none";
  int checks = 0;
  auto record = [&](const char* name, const es::nn::GradCheckResult& r) {
    ++checks;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = name;
    }
  };

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    es::nn::Rng rng(seed);

    {
      es::nn::ParameterSet params;
      es::nn::add_linear(params, "fc", 6, 4, rng);
      es::nn::Value x = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({3, 6}, 6, rng), "x");
      std::vector<es::nn::Value> leaves{x};
      for (std::size_t i = 0; i < params.count(); ++i) leaves.push_back(params.at(i));
      record("linear", es::nn::grad_check(
                           [&] { return es::nn::sum_all(es::nn::linear(x, params, "fc")); },
                           leaves, 1e-4));
    }
    {
      es::nn::ParameterSet params;
      es::nn::add_layer_norm(params, "ln", 5);
      es::nn::Value x = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({2, 5}, 5, rng), "x");
      std::vector<es::nn::Value> leaves{x};
      for (std::size_t i = 0; i < params.count(); ++i) leaves.push_back(params.at(i));
      record("layer_norm", es::nn::grad_check(
                               [&] { return es::nn::sum_all(es::nn::layer_norm(x, params, "ln")); },
                               leaves, 1e-4));
    }
    {
      es::nn::ParameterSet params;
      es::nn::add_mhsa(params, "attn", 8, rng);
      es::nn::Value x = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({4, 8}, 8, rng), "x");
      std::vector<es::nn::Value> leaves{x};
      for (std::size_t i = 0; i < params.count(); ++i) leaves.push_back(params.at(i));
      record("mhsa", es::nn::grad_check(
                         [&] { return es::nn::sum_all(es::nn::mhsa_forward(x, params, "attn", 2)); },
                         leaves, 1e-4));
    }
    {
      es::nn::ParameterSet params;
      es::nn::add_mlp(params, "mlp", 6, 10, rng);
      es::nn::Value x = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({3, 6}, 6, rng), "x");
      std::vector<es::nn::Value> leaves{x};
      for (std::size_t i = 0; i < params.count(); ++i) leaves.push_back(params.at(i));
      record("mlp", es::nn::grad_check(
                        [&] { return es::nn::sum_all(es::nn::mlp_forward(x, params, "mlp")); },
                        leaves, 1e-4));
    }
    {
      es::nn::Value x = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({2, 12}, 12, rng), "x");
      es::nn::Value w = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({3, 2, 5}, 10, rng), "w");
      es::nn::Value b = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({1, 3}, 10, rng), "b");
      record("conv1d_circular",
             es::nn::grad_check(
                 [&] { return es::nn::sum_all(es::nn::conv1d_circular(x, w, b, 2)); },
                 {x, w, b}, 1e-4));
      es::nn::Value y = es::nn::Value::leaf(es::nn::Tensor::uniform_fan_in({4, 9}, 9, rng), "y");
      record("global_avg_pool",
             es::nn::grad_check([&] { return es::nn::sum_all(es::nn::global_avg_pool(y)); }, {y},
                                1e-4));
    }
    {
      es::nn::Tensor pred_t = es::nn::Tensor::zeros({1, 24});
      es::nn::Tensor label_t = es::nn::Tensor::zeros({1, 24});
      for (int i = 0; i < 24; ++i) {
        pred_t.data()[i] = 2.0 + rng.uniform(-0.5, 0.5);
        label_t.data()[i] = 2.0 + rng.uniform(-0.5, 0.5);
      }
      es::nn::Value pred = es::nn::Value::leaf(pred_t, "pred");
      record("scan_loss", es::nn::grad_check(
                              [&] {
                                std::vector<double> label(label_t.data(), label_t.data() + 24);
                                return es::scan::scan_loss_value(pred, label, 1, 1.0);
                              },
                              {pred}, 1e-5));
    }
    {
      es::nn::Tensor disp_t = es::nn::Tensor::zeros({1, 3});
      es::nn::Tensor rot_t = es::nn::Tensor::zeros({1, 6});
      for (int i = 0; i < 3; ++i) disp_t.data()[i] = rng.uniform(-0.5, 0.5);
      for (int i = 0; i < 6; ++i) rot_t.data()[i] = rng.uniform(-1.0, 1.0);
      es::odom::OdomOutput out;
      out.disp = es::nn::Value::leaf(disp_t, "disp");
      out.rot6 = es::nn::Value::leaf(rot_t, "rot6");
      es::data::Transform3 label = es::data::Transform3::planar(0.1, -0.05, 0.3);
      record("odom_loss",
             es::nn::grad_check([&] { return es::odom::odom_loss_value(out, label); },
                                {out.disp, out.rot6}, 1e-5));
    }
  }

  Outcome out;
  out.pass = worst < 1e-3;
  out.detail = fmt("%d checks, max rel error %.2e (%s)", checks, worst, worst_name.c_str());
  return out;
}

// -- criterion 3 -------------------------------------------------------------

Outcome criterion_curvature(Context&) {
  double worst = 0.0;
  for (double r : {0.5, 1.0, 2.0, 3.7, 5.0, 8.0}) {
    std::vector<double> ranges(720, r);
    auto prof = es::scan::curvature_profile(ranges, 1);
    for (double k : prof) worst = std::max(worst, std::abs(k - 1.0 / r));
  }

  // Straight wall y = 1.5 seen by beams near +90 degrees: collinear triples.
  std::vector<double> wall(720, 4.0);
  int exact_zero = 0;
  int wall_indices = 0;
  for (int i = 0; i < 720; ++i) {
    const double a = static_cast<double>(i) * es::sim::kScanStepRad;
    if (std::sin(a) > 0.55) wall[static_cast<std::size_t>(i)] = 1.5 / std::sin(a);
  }
  for (int i = 0; i < 720; ++i) {
    const double a_prev = static_cast<double>(i - 1) * es::sim::kScanStepRad;
    const double a_next = static_cast<double>(i + 1) * es::sim::kScanStepRad;
    if (std::sin(a_prev) > 0.56 && std::sin(a_next) > 0.56) {
      ++wall_indices;
      if (es::scan::menger_curvature(wall, i, 1) == 0.0) ++exact_zero;
    }
  }

  Outcome out;
  out.pass = worst < 1e-9 && wall_indices > 100 && exact_zero == wall_indices;
  out.detail = fmt("constant scans max |k - 1/r| = %.2e, %d/%d collinear triples exactly 0", worst,
                   exact_zero, wall_indices);
  return out;
}

// -- criterion 4 -------------------------------------------------------------

Outcome criterion_preintegration(Context& ctx) {
  double worst_pos = 0.0;
  double worst_ang = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ds = fixture_dataset(ctx.world, 12.0, 1000 + seed);
    es::sim::Pose2 pose = ds.records.front().pose;
    for (std::size_t i = 1; i < ds.records.size(); ++i) {
      pose = es::data::apply_transform(pose, ds.records[i].rel);
    }
    const auto& last = ds.records.back().pose;
    worst_pos = std::max(worst_pos, std::hypot(pose.x - last.x, pose.y - last.y));
    worst_ang = std::max(worst_ang, std::abs(std::remainder(pose.theta - last.theta, 2.0 * kPi)));
  }
  Outcome out;
  out.pass = worst_pos < 1e-9 && worst_ang < 1e-9;
  out.detail = fmt("20 trajectories, max position error %.2e m, max angle error %.2e rad",
                   worst_pos, worst_ang);
  return out;
}

// -- criterion 5 -------------------------------------------------------------

Outcome criterion_rotation_validity(Context&) {
  es::nn::Rng rng(55);
  double worst_ortho = 0.0;
  double worst_det = 0.0;
  int fallbacks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 6> six{};
    for (auto& v : six) v = rng.uniform(-2.0, 2.0);
    auto proj = es::odom::project_to_rotation(six);
    if (proj.fallback) ++fallbacks;
    const auto& r = proj.r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += r[static_cast<std::size_t>(3 * k + i)] *
                                           r[static_cast<std::size_t>(3 * k + j)];
        worst_ortho = std::max(worst_ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
      }
    }
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    worst_det = std::max(worst_det, std::abs(det - 1.0));
  }
  Outcome out;
  out.pass = worst_ortho < 1e-6 && worst_det < 1e-6;
  out.detail = fmt("1000 projections, max |R'R - I| = %.2e, max |det - 1| = %.2e, %d fallbacks",
                   worst_ortho, worst_det, fallbacks);
  return out;
}

// -- criterion 6 -------------------------------------------------------------

Outcome criterion_training_smoke(Context& ctx) {
  ctx.ensure_trained();
  const auto& evals = ctx.scan_result.evals;
  const double first = evals.front().total;
  double best = first;
  for (const auto& e : evals) best = std::min(best, e.total);
  const bool scan_ok = best <= 0.5 * first;

  const auto& oevals = ctx.overfit_result.evals;
  const double ofirst = oevals.front().total;
  double obest = ofirst;
  for (const auto& e : oevals) obest = std::min(obest, e.total);
  const int osteps = static_cast<int>(ctx.overfit_result.steps.size());
  const bool odom_ok = obest < 0.01 * ofirst && osteps <= 500;

  const double total_seconds = ctx.scan_seconds + ctx.overfit_seconds;
  Outcome out;
  out.pass = scan_ok && odom_ok && total_seconds < 600.0;
  out.detail = fmt("scan loss %.3f -> %.3f (%.0f%% drop, %zu windows), overfit %.2e -> %.2e in %d "
                   "steps, %.0f s",
                   first, best, 100.0 * (1.0 - best / first), ctx.window_count, ofirst, obest,
                   osteps, total_seconds);
  return out;
}

// -- criterion 7 -------------------------------------------------------------

Outcome criterion_slam(Context& ctx) {
  ctx.ensure_slam();
  Outcome out;
  out.pass = ctx.overlap >= 50.0 && ctx.score.drift_percent <= 10.0;
  out.detail = fmt("map overlap %.1f%% (>= 50), drift %.1f%% of %.1f m path (<= 10)", ctx.overlap,
                   ctx.score.drift_percent, ctx.score.path_length);
  return out;
}

// -- criterion 8 -------------------------------------------------------------

Outcome criterion_realtime(Context& ctx) {
  ctx.ensure_slam();
  const auto& res = *ctx.slam_result;
  const std::size_t frames = res.poses.size();
  double worst_ms = 0.0;
  for (double ms : res.frame_ms) worst_ms = std::max(worst_ms, ms);
  const std::size_t expected = (frames + 2) / 3;
  bool cadence = res.map_frames.size() == expected && frames % 3 == 0;
  for (std::size_t i = 0; i < res.map_frames.size(); ++i) {
    if (res.map_frames[i] != static_cast<int>(3 * i)) cadence = false;
  }
  Outcome out;
  out.pass = worst_ms < 333.0 && cadence;
  out.detail = fmt("max frame latency %.1f ms (< 333), map updates %zu of %zu frames (every 3rd)",
                   worst_ms, res.map_frames.size(), frames);
  return out;
}

// -- criterion 9 -------------------------------------------------------------

Outcome criterion_angular_response(Context&) {
  auto segs = es::sim::make_box(1.95, -0.05, 2.05, 0.05);
  auto world = es::sim::WorldModel::from_segments(segs);
  es::sim::SensorSpec spec;
  const double response = es::sim::angular_response_deg(world, {0.0, 0.0, 0.0}, spec);
  Outcome out;
  out.pass = response < 65.0;
  out.detail = fmt("10 cm obstacle at 2.0 m: response %.1f deg (< 65 deg field of view)",
                   response);
  return out;
}

// -- criterion 10 ------------------------------------------------------------

int run_cli_quiet(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("echoslam");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* old_out = std::cout.rdbuf(sink.rdbuf());
  auto* old_err = std::cerr.rdbuf(sink.rdbuf());
  const int rc = es::cli::run_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "<missing " + path + ">";
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome criterion_determinism(Context& ctx) {
  namespace fs = std::filesystem;
  fs::remove_all("acc_det");
  fs::create_directories("acc_det/a");
  fs::create_directories("acc_det/b");
  ctx.world.save("acc_det/world.txt");

  bool ok = true;
  std::string first_diff;
  auto run_side = [&](const std::string& side) {
    const std::string d = "acc_det/" + side;
    ok = ok && run_cli_quiet({"gen-data", "--world", "acc_det/world.txt", "--out",
                              d + "/data.jsonl", "--seed", "7", "--duration", "5"}) == 0;
    ok = ok && run_cli_quiet({"train", "--data", d + "/data.jsonl", "--out-dir", d + "/run",
                              "--scan-epochs", "1", "--odom-epochs", "1", "--batch-size", "8",
                              "--seed", "4"}) == 0;
    ok = ok && run_cli_quiet({"slam", "--data", d + "/data.jsonl", "--scan-net",
                              d + "/run/scan_net.ckpt", "--odom-net", d + "/run/odom_net.ckpt",
                              "--out-dir", d + "/slam", "--resolution", "0.1"}) == 0;
  };
  run_side("a");
  run_side("b");

  int compared = 0;
  if (ok) {
    const char* files[] = {"data.jsonl",        "data.jsonl.summary.txt", "run/scan_net.ckpt",
                           "run/odom_net.ckpt", "run/scan_loss.csv",      "run/scan_eval.csv",
                           "run/odom_loss.csv", "run/odom_eval.csv",      "slam/map.pgm",
                           "slam/map.meta",     "slam/trajectory.csv"};
    for (const char* f : files) {
      ++compared;
      if (slurp(std::string("acc_det/a/") + f) != slurp(std::string("acc_det/b/") + f)) {
        ok = false;
        if (first_diff.empty()) first_diff = f;
      }
    }
  }
  fs::remove_all("acc_det");

  Outcome out;
  out.pass = ok;
  out.detail = ok ? fmt("gen-data, train, slam repeated: %d artifacts byte-identical", compared)
                  : ("first difference: " + (first_diff.empty() ? "command failed" : first_diff));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome(Context&)> run;
  };
  const std::vector<Entry> entries = {
      {1, "cone echo matches the 651-ray fan oracle", criterion_cone_oracle},
      {2, "layers and losses pass finite-difference gradient checks", criterion_gradients},
      {3, "curvature is 1/r on constant scans and 0 on collinear triples", criterion_curvature},
      {4, "relative-transform chains close on the final pose", criterion_preintegration},
      {5, "projected rotation heads are orthonormal with unit determinant",
       criterion_rotation_validity},
      {6, "training smoke: scan loss halves, single-sample odom overfits", criterion_training_smoke},
      {7, "synthetic slam reaches the overlap and drift targets", criterion_slam},
      {8, "per-frame latency and map cadence meet the realtime budget", criterion_realtime},
      {9, "array response is finer than a single sensor field of view", criterion_angular_response},
      {10, "gen-data, train and slam are byte-deterministic", criterion_determinism},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  Context ctx;
  int failures = 0;
  for (const auto& entry : entries) {
    if (!wanted.empty() && wanted.find(entry.id) == wanted.end()) continue;
    Outcome outcome;
    try {
      outcome = entry.run(ctx);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %2d %s  %s (%s)\n", entry.id, outcome.pass ? "pass" : "FAIL",
                entry.name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
