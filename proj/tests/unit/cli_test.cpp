#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "echoslam/cli/cli.hpp"
#include "echoslam/data/dataset.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/scan/scan_net.hpp"
#include "echoslam/scan/train.hpp"
#include "echoslam/slam/grid.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("echoslam");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = echoslam::cli::run_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  REQUIRE(os.good());
  os << text;
}

const char* kBoxWorld =
    "-2 -2 2 -2\n"
    "2 -2 2 2\n"
    "2 2 -2 2\n"
    "-2 2 -2 -2\n";

struct Point {
  double x = 0.0;
  double y = 0.0;
};

std::vector<Point> parse_group(const std::string& svg, const std::string& id) {
  const std::string open = "<g id=\"" + id + "\"";
  const auto begin = svg.find(open);
  REQUIRE(begin != std::string::npos);
  const auto end = svg.find("</g>", begin);
  REQUIRE(end != std::string::npos);
  std::vector<Point> points;
  std::size_t pos = begin;
  while (true) {
    pos = svg.find("<circle cx=\"", pos);
    if (pos == std::string::npos || pos > end) break;
    Point p;
    REQUIRE(std::sscanf(svg.c_str() + pos, "<circle cx=\"%lf\" cy=\"%lf\"", &p.x, &p.y) == 2);
    p.x /= 100.0;
    p.y /= -100.0;
    points.push_back(p);
    ++pos;
  }
  return points;
}

}  // namespace

TEST_CASE("cli end to end chain") {
  namespace fs = std::filesystem;
  write_file("cli_world.txt", kBoxWorld);

  auto gen = run_cli({"gen-data", "--world", "cli_world.txt", "--out", "cli_data.jsonl",
                      "--seed", "5", "--duration", "4"});
  CAPTURE(gen.err);
  REQUIRE(gen.code == 0);
  CHECK(gen.out.find("wrote cli_data.jsonl") != std::string::npos);

  auto ds = echoslam::data::read_dataset("cli_data.jsonl");
  CHECK(ds.records.size() == 12);
  CHECK(ds.info.seed == 5);
  CHECK(ds.info.world_file == "cli_world.txt");

  const std::string summary = slurp("cli_data.jsonl.summary.txt");
  CHECK(summary.find("world cli_world.txt\n") != std::string::npos);
  CHECK(summary.find("seed 5\n") != std::string::npos);
  CHECK(summary.find("records 12\n") != std::string::npos);
  CHECK(summary.find("sensor_hz 3\n") != std::string::npos);
  CHECK(summary.find("path_length_m ") != std::string::npos);

  SUBCASE("gen-data is byte deterministic") {
    auto again = run_cli({"gen-data", "--world", "cli_world.txt", "--out", "cli_data2.jsonl",
                          "--seed", "5", "--duration", "4"});
    REQUIRE(again.code == 0);
    CHECK(slurp("cli_data2.jsonl") == slurp("cli_data.jsonl"));
    CHECK(slurp("cli_data2.jsonl.summary.txt") == summary);
    fs::remove("cli_data2.jsonl");
    fs::remove("cli_data2.jsonl.summary.txt");
  }

  SUBCASE("gen-data kinematic limit flags") {
    auto slow = run_cli({"gen-data", "--world", "cli_world.txt", "--out", "cli_data_slow.jsonl",
                         "--seed", "5", "--duration", "4", "--max-speed", "0.25", "--max-accel",
                         "0.5"});
    CAPTURE(slow.err);
    REQUIRE(slow.code == 0);
    auto slow_ds = echoslam::data::read_dataset("cli_data_slow.jsonl");
    REQUIRE(slow_ds.records.size() == 12);
    CHECK(slurp("cli_data_slow.jsonl") != slurp("cli_data.jsonl"));
    // The sampler may add an outward escape component on top of the speed
    // cap, so per-step travel is bounded by twice the capped step.
    double worst_step = 0.0;
    for (const auto& rec : slow_ds.records) {
      worst_step = std::max(worst_step, std::hypot(rec.rel.t[0], rec.rel.t[1]));
    }
    CHECK(worst_step < 2.0 * 0.25 / 3.0 + 1e-9);
    CHECK(run_cli({"gen-data", "--world", "cli_world.txt", "--out", "cli_data_bad.jsonl",
                   "--max-accel", "0"})
              .code == 2);
    fs::remove("cli_data_slow.jsonl");
    fs::remove("cli_data_slow.jsonl.summary.txt");
  }

  SUBCASE("ini config supplies defaults") {
    write_file("cli_gen.ini", "[gen-data]\nseed=5\nduration=4\n");
    auto from_ini = run_cli({"--config", "cli_gen.ini", "gen-data", "--world", "cli_world.txt",
                             "--out", "cli_data3.jsonl"});
    CAPTURE(from_ini.err);
    REQUIRE(from_ini.code == 0);
    CHECK(slurp("cli_data3.jsonl") == slurp("cli_data.jsonl"));
    fs::remove("cli_gen.ini");
    fs::remove("cli_data3.jsonl");
    fs::remove("cli_data3.jsonl.summary.txt");
  }

  SUBCASE("train slam eval plot") {
    auto train = run_cli({"train", "--data", "cli_data.jsonl", "--out-dir", "cli_run",
                          "--scan-epochs", "1", "--odom-epochs", "1", "--batch-size", "8",
                          "--seed", "3"});
    CAPTURE(train.err);
    REQUIRE(train.code == 0);
    for (const char* name : {"scan_net.ckpt", "odom_net.ckpt", "scan_loss.csv", "scan_eval.csv",
                             "odom_loss.csv", "odom_eval.csv"})
      CHECK(fs::exists(fs::path("cli_run") / name));
    CHECK(slurp("cli_run/scan_loss.csv").rfind("epoch,step,distance,curvature,total\n", 0) == 0);
    CHECK(slurp("cli_run/odom_eval.csv").rfind("epoch,translation,rotation,total\n", 0) == 0);

    auto slam = run_cli({"slam", "--data", "cli_data.jsonl", "--scan-net", "cli_run/scan_net.ckpt",
                         "--odom-net", "cli_run/odom_net.ckpt", "--out-dir", "cli_slam",
                         "--resolution", "0.1", "--timing"});
    CAPTURE(slam.err);
    REQUIRE(slam.code == 0);
    const std::string traj = slurp("cli_slam/trajectory.csv");
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 13);
    CHECK(traj.rfind("frame,ts,est_x,est_y,est_theta,gt_x,gt_y,gt_theta\n", 0) == 0);
    CHECK(fs::exists("cli_slam/timing.csv"));
    auto grid = echoslam::slam::load_pgm("cli_slam/map.pgm", "cli_slam/map.meta");
    CHECK(grid.occupied_cells().size() > 0);

    auto oracle = run_cli({"slam", "--data", "cli_data.jsonl", "--scan-net",
                           "cli_run/scan_net.ckpt", "--odom-net", "cli_run/odom_net.ckpt",
                           "--out-dir", "cli_oracle", "--resolution", "0.1",
                           "--reference-scans", "--reference-transforms"});
    CAPTURE(oracle.err);
    REQUIRE(oracle.code == 0);
    std::istringstream rows(slurp("cli_oracle/trajectory.csv"));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      std::vector<double> cols;
      std::istringstream ls(line);
      std::string field;
      while (std::getline(ls, field, ',')) cols.push_back(std::stod(field));
      REQUIRE(cols.size() == 8);
      CHECK(std::abs(cols[2] - cols[5]) < 1e-6);
      CHECK(std::abs(cols[3] - cols[6]) < 1e-6);
      CHECK(std::abs(std::remainder(cols[4] - cols[7], 2.0 * kPi)) < 1e-6);
    }
    fs::remove_all("cli_oracle");

    auto eval = run_cli({"eval", "--data", "cli_data.jsonl", "--scan-net", "cli_run/scan_net.ckpt",
                         "--odom-net", "cli_run/odom_net.ckpt", "--out", "cli_report.txt",
                         "--resolution", "0.1"});
    CAPTURE(eval.err);
    REQUIRE(eval.code == 0);
    const std::string report = slurp("cli_report.txt");
    CHECK(report.find("Map Overlap") != std::string::npos);
    CHECK(report.find("Odometry ") != std::string::npos);
    CHECK(report.find("Map Rate") != std::string::npos);
    CHECK(report.find("Odometry Rate") != std::string::npos);
    CHECK(report.find("synthetic-benchmark substitutes") != std::string::npos);
    CHECK(eval.out.find("Map Overlap") != std::string::npos);

    auto plot = run_cli({"plot-scan", "--data", "cli_data.jsonl", "--scan-net",
                         "cli_run/scan_net.ckpt", "--out", "cli_plot.svg", "--index", "5"});
    CAPTURE(plot.err);
    REQUIRE(plot.code == 0);
    const std::string svg = slurp("cli_plot.svg");

    auto ultra = parse_group(svg, "ultrasonic");
    auto predicted = parse_group(svg, "predicted");
    auto label = parse_group(svg, "label");
    REQUIRE(ultra.size() == 12);
    REQUIRE(predicted.size() == 720);
    REQUIRE(label.size() == 720);
    for (std::size_t s = 0; s < 12; ++s) {
      const double a = -ds.info.sensor.interval_rad * static_cast<double>(s);
      const double r = ds.records[5].ultra[s];
      CHECK(ultra[s].x == doctest::Approx(r * std::cos(a)).epsilon(1e-6));
      CHECK(ultra[s].y == doctest::Approx(r * std::sin(a)).epsilon(1e-6));
    }
    echoslam::nn::Rng net_rng(0);
    echoslam::scan::ScanNet net(echoslam::scan::ScanNetConfig{}, net_rng);
    net.load("cli_run/scan_net.ckpt");
    auto windows = echoslam::scan::dataset_windows(ds, net.config().window, ds.info.sensor.r_max);
    auto expect = net.predict(windows[5]);
    for (std::size_t i = 0; i < 720; ++i) {
      const double a = static_cast<double>(i) * (2.0 * kPi / 720.0);
      CHECK(std::hypot(predicted[i].x, predicted[i].y) == doctest::Approx(expect[i]).epsilon(1e-6));
      CHECK(std::hypot(label[i].x, label[i].y) ==
            doctest::Approx(ds.records[5].scan[i]).epsilon(1e-6));
      if (expect[i] > 1e-3) {
        const double got = std::atan2(predicted[i].y, predicted[i].x);
        const double want = std::remainder(a, 2.0 * kPi);
        CHECK(std::abs(std::remainder(got - want, 2.0 * kPi)) < 1e-4);
      }
    }

    fs::remove_all("cli_run");
    fs::remove_all("cli_slam");
    fs::remove("cli_report.txt");
    fs::remove("cli_plot.svg");
  }

  fs::remove("cli_world.txt");
  fs::remove("cli_data.jsonl");
  fs::remove("cli_data.jsonl.summary.txt");
}

TEST_CASE("cli exit codes") {
  namespace fs = std::filesystem;

  SUBCASE("help returns zero") {
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"gen-data", "--help"}).code == 0);
  }

  SUBCASE("missing subcommand or bad flag is a usage error") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"gen-data"}).code == 2);
    CHECK(run_cli({"gen-data", "--world"}).code == 2);
    CHECK(run_cli({"no-such-command"}).code == 2);
    CHECK(run_cli({"train", "--data", "x.jsonl", "--odom-scans", "bogus"}).code == 2);
  }

  SUBCASE("missing inputs are user errors") {
    auto r = run_cli({"gen-data", "--world", "cli_missing_world.txt", "--out", "cli_tmp.jsonl"});
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(run_cli({"train", "--data", "cli_missing.jsonl"}).code == 2);
  }

  SUBCASE("malformed dataset is a user error") {
    write_file("cli_bad.jsonl", "this is not a dataset\n");
    CHECK(run_cli({"train", "--data", "cli_bad.jsonl"}).code == 2);
    fs::remove("cli_bad.jsonl");
  }

  SUBCASE("corrupt checkpoint is a format error") {
    write_file("cli_world2.txt", kBoxWorld);
    auto gen = run_cli({"gen-data", "--world", "cli_world2.txt", "--out", "cli_data4.jsonl",
                        "--seed", "2", "--duration", "2"});
    REQUIRE(gen.code == 0);
    write_file("cli_bad.ckpt", "junk");
    auto r = run_cli({"slam", "--data", "cli_data4.jsonl", "--scan-net", "cli_bad.ckpt",
                      "--odom-net", "cli_bad.ckpt"});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
    fs::remove("cli_world2.txt");
    fs::remove("cli_data4.jsonl");
    fs::remove("cli_data4.jsonl.summary.txt");
    fs::remove("cli_bad.ckpt");
  }

  SUBCASE("plot index out of range is a user error") {
    write_file("cli_world3.txt", kBoxWorld);
    auto gen = run_cli({"gen-data", "--world", "cli_world3.txt", "--out", "cli_data5.jsonl",
                        "--seed", "2", "--duration", "2"});
    REQUIRE(gen.code == 0);
    echoslam::nn::Rng rng(1);
    echoslam::scan::ScanNet net(echoslam::scan::ScanNetConfig{}, rng);
    net.save("cli_scan.ckpt");
    CHECK(run_cli({"plot-scan", "--data", "cli_data5.jsonl", "--scan-net", "cli_scan.ckpt",
                   "--out", "cli_p.svg", "--index", "99"})
              .code == 2);
    fs::remove("cli_world3.txt");
    fs::remove("cli_data5.jsonl");
    fs::remove("cli_data5.jsonl.summary.txt");
    fs::remove("cli_scan.ckpt");
  }
}
