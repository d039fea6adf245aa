#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "echoslam/data/dataset.hpp"
#include "echoslam/data/preintegrate.hpp"
#include "echoslam/errors.hpp"
#include "echoslam/data/trajectory.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/odom/odom_net.hpp"
#include "echoslam/odom/rotation.hpp"
#include "echoslam/odom/train.hpp"
#include "echoslam/scan/curvature.hpp"
#include "echoslam/scan/scan_net.hpp"
#include "echoslam/scan/train.hpp"
#include "echoslam/scan/window.hpp"
#include "echoslam/sim/lidar.hpp"
#include "echoslam/sim/sensors.hpp"
#include "echoslam/sim/world.hpp"
#include "echoslam/slam/grid.hpp"
#include "echoslam/slam/metrics.hpp"
#include "echoslam/slam/pipeline.hpp"

namespace py = pybind11;
using namespace echoslam;

namespace {

sim::Segment make_segment(double x1, double y1, double x2, double y2) {
  return sim::Segment{{x1, y1}, {x2, y2}};
}

scan::ScanNet make_scan_net(const scan::ScanNetConfig& cfg, std::uint64_t seed) {
  nn::Rng rng(seed);
  return scan::ScanNet(cfg, rng);
}

odom::OdomNet make_odom_net(const odom::OdomNetConfig& cfg, std::uint64_t seed) {
  nn::Rng rng(seed);
  return odom::OdomNet(cfg, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ultrasonic-array slam core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);

  m.attr("SENSOR_COUNT") = sim::kSensorCount;
  m.attr("SCAN_SIZE") = sim::kScanSize;
  m.attr("SCAN_STEP_RAD") = sim::kScanStepRad;
  m.attr("LIDAR_MAX_RANGE") = sim::kLidarMaxRange;

  py::class_<nn::Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", py::overload_cast<>(&nn::Rng::uniform))
      .def("uniform", py::overload_cast<double, double>(&nn::Rng::uniform))
      .def("gaussian", &nn::Rng::gaussian)
      .def("uniform_int", &nn::Rng::uniform_int);

  py::class_<sim::Pose2>(m, "Pose2")
      .def(py::init<>())
      .def(py::init([](double x, double y, double theta) {
             return sim::Pose2{x, y, theta};
           }),
           py::arg("x"), py::arg("y"), py::arg("theta"))
      .def_readwrite("x", &sim::Pose2::x)
      .def_readwrite("y", &sim::Pose2::y)
      .def_readwrite("theta", &sim::Pose2::theta)
      .def("__repr__", [](const sim::Pose2& p) {
        return "Pose2(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
               std::to_string(p.theta) + ")";
      });

  py::class_<sim::SensorSpec>(m, "SensorSpec")
      .def(py::init<>())
      .def_readwrite("count", &sim::SensorSpec::count)
      .def_readwrite("interval_rad", &sim::SensorSpec::interval_rad)
      .def_readwrite("fov_rad", &sim::SensorSpec::fov_rad)
      .def_readwrite("r_min", &sim::SensorSpec::r_min)
      .def_readwrite("r_max", &sim::SensorSpec::r_max)
      .def_readwrite("noise_sigma", &sim::SensorSpec::noise_sigma)
      .def("sensor_heading", &sim::SensorSpec::sensor_heading)
      .def("validate", &sim::SensorSpec::validate);

  py::class_<sim::WorldModel>(m, "WorldModel")
      .def_static("load", &sim::WorldModel::load)
      .def_static("from_segments",
                  [](const std::vector<std::array<double, 4>>& segs) {
                    std::vector<sim::Segment> out;
                    out.reserve(segs.size());
                    for (const auto& s : segs) out.push_back(make_segment(s[0], s[1], s[2], s[3]));
                    return sim::WorldModel::from_segments(out);
                  })
      .def("save", &sim::WorldModel::save)
      .def("segment_count", [](const sim::WorldModel& w) { return w.segments().size(); })
      .def("segments",
           [](const sim::WorldModel& w) {
             std::vector<std::array<double, 4>> out;
             out.reserve(w.segments().size());
             for (const auto& s : w.segments())
               out.push_back({s.a.x, s.a.y, s.b.x, s.b.y});
             return out;
           })
      .def("clearance", [](const sim::WorldModel& w, double x, double y) {
        return w.clearance({x, y});
      });

  m.def("make_box", [](double xmin, double ymin, double xmax, double ymax) {
    std::vector<std::array<double, 4>> out;
    for (const auto& s : sim::make_box(xmin, ymin, xmax, ymax))
      out.push_back({s.a.x, s.a.y, s.b.x, s.b.y});
    return out;
  });

  m.def(
      "ray_cast",
      [](const sim::WorldModel& world, std::array<double, 2> origin, std::array<double, 2> dir) {
        return sim::ray_cast(world, {origin[0], origin[1]}, {dir[0], dir[1]});
      },
      py::arg("world"), py::arg("origin"), py::arg("dir"));
  m.def("cone_first_echo", &sim::cone_first_echo, py::arg("world"), py::arg("pose"),
        py::arg("sensor"), py::arg("spec"), py::arg("rng").none(true));
  m.def(
      "sense_array",
      [](const sim::WorldModel& world, const sim::Pose2& pose, const sim::SensorSpec& spec,
         nn::Rng* rng, double ts) { return sim::sense_array(world, pose, spec, rng, ts).ranges; },
      py::arg("world"), py::arg("pose"), py::arg("spec"), py::arg("rng").none(true),
      py::arg("ts") = 0.0);
  m.def("angular_response_deg", &sim::angular_response_deg);
  m.def(
      "simulate_lidar",
      [](const sim::WorldModel& world, const sim::Pose2& pose) {
        return sim::simulate_lidar(world, pose).ranges;
      },
      py::arg("world"), py::arg("pose"));

  py::class_<data::Transform3>(m, "Transform3")
      .def(py::init<>())
      .def_static("identity", &data::Transform3::identity)
      .def_static("planar", &data::Transform3::planar, py::arg("dx"), py::arg("dy"),
                  py::arg("dyaw"))
      .def_readwrite("t", &data::Transform3::t)
      .def_readwrite("R", &data::Transform3::R)
      .def("yaw", &data::Transform3::yaw)
      .def("is_rotation", &data::Transform3::is_rotation, py::arg("tol") = 1e-6);

  py::class_<data::KinematicLimits>(m, "KinematicLimits")
      .def(py::init<>())
      .def_readwrite("max_speed", &data::KinematicLimits::max_speed)
      .def_readwrite("max_accel", &data::KinematicLimits::max_accel)
      .def_readwrite("max_ang_speed", &data::KinematicLimits::max_ang_speed)
      .def_readwrite("max_ang_accel", &data::KinematicLimits::max_ang_accel);

  py::class_<data::TrajectorySample>(m, "TrajectorySample")
      .def_readonly("ts", &data::TrajectorySample::ts)
      .def_readonly("pose", &data::TrajectorySample::pose);

  py::class_<data::FrameRecord>(m, "FrameRecord")
      .def_readonly("ts", &data::FrameRecord::ts)
      .def_readonly("ultra", &data::FrameRecord::ultra)
      .def_readonly("scan", &data::FrameRecord::scan)
      .def_readonly("pose", &data::FrameRecord::pose)
      .def_readonly("rel", &data::FrameRecord::rel);

  py::class_<data::DatasetInfo>(m, "DatasetInfo")
      .def(py::init<>())
      .def_readwrite("world_file", &data::DatasetInfo::world_file)
      .def_readwrite("sensor_hz", &data::DatasetInfo::sensor_hz)
      .def_readwrite("lidar_hz", &data::DatasetInfo::lidar_hz)
      .def_readwrite("mocap_hz", &data::DatasetInfo::mocap_hz)
      .def_readwrite("duration_s", &data::DatasetInfo::duration_s)
      .def_readwrite("seed", &data::DatasetInfo::seed)
      .def_readwrite("sensor", &data::DatasetInfo::sensor)
      .def_readwrite("limits", &data::DatasetInfo::limits);

  py::class_<data::Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("info", &data::Dataset::info)
      .def_readonly("records", &data::Dataset::records)
      .def("__len__", [](const data::Dataset& ds) { return ds.records.size(); });

  m.def("sample_trajectory", &data::sample_trajectory, py::arg("world"), py::arg("limits"),
        py::arg("duration_s"), py::arg("seed"));
  m.def("assemble_dataset", &data::assemble_dataset, py::arg("world"), py::arg("samples"),
        py::arg("info"));
  m.def("write_dataset", &data::write_dataset, py::arg("dataset"), py::arg("path"));
  m.def("read_dataset", &data::read_dataset, py::arg("path"));
  m.def("relative_transform", &data::relative_transform, py::arg("a"), py::arg("b"));
  m.def("apply_transform", &data::apply_transform, py::arg("pose"), py::arg("rel"));

  py::class_<scan::Window>(m, "Window")
      .def_static("cold_start", &scan::Window::cold_start, py::arg("frame"), py::arg("k"),
                  py::arg("r_norm"))
      .def_readonly("k", &scan::Window::k)
      .def_readonly("r_norm", &scan::Window::r_norm)
      .def_readonly("values", &scan::Window::values);
  m.def("window_push", &scan::window_push, py::arg("window"), py::arg("frame"));

  m.def("menger_curvature", &scan::menger_curvature, py::arg("ranges"), py::arg("i"),
        py::arg("n"));
  m.def("curvature_profile", &scan::curvature_profile, py::arg("ranges"), py::arg("n"));

  py::class_<scan::ScanLossParts>(m, "ScanLossParts")
      .def_readonly("distance", &scan::ScanLossParts::distance)
      .def_readonly("curvature", &scan::ScanLossParts::curvature)
      .def_readonly("total", &scan::ScanLossParts::total);
  m.def("scan_loss", &scan::scan_loss, py::arg("pred"), py::arg("label"), py::arg("n") = 1,
        py::arg("curvature_weight") = 1.0);

  py::class_<scan::ScanNetConfig>(m, "ScanNetConfig")
      .def(py::init<>())
      .def_readwrite("window", &scan::ScanNetConfig::window)
      .def_readwrite("input_dim", &scan::ScanNetConfig::input_dim)
      .def_readwrite("d_model", &scan::ScanNetConfig::d_model)
      .def_readwrite("heads", &scan::ScanNetConfig::heads)
      .def_readwrite("blocks", &scan::ScanNetConfig::blocks)
      .def_readwrite("mlp_hidden", &scan::ScanNetConfig::mlp_hidden)
      .def_readwrite("output_size", &scan::ScanNetConfig::output_size)
      .def_readwrite("out_scale", &scan::ScanNetConfig::out_scale)
      .def_readwrite("curvature_neighbor", &scan::ScanNetConfig::curvature_neighbor)
      .def_readwrite("curvature_weight", &scan::ScanNetConfig::curvature_weight);

  py::class_<scan::ScanNet>(m, "ScanNet")
      .def(py::init(&make_scan_net), py::arg("config") = scan::ScanNetConfig{},
           py::arg("seed") = 1)
      .def("predict",
           py::overload_cast<const scan::Window&>(&scan::ScanNet::predict, py::const_),
           py::arg("window"))
      .def("num_params", [](const scan::ScanNet& n) { return n.params().total_elements(); })
      .def("save", &scan::ScanNet::save)
      .def("load", &scan::ScanNet::load);

  py::class_<scan::ScanTrainConfig>(m, "ScanTrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &scan::ScanTrainConfig::epochs)
      .def_readwrite("batch_size", &scan::ScanTrainConfig::batch_size)
      .def_readwrite("lr", &scan::ScanTrainConfig::lr)
      .def_readwrite("seed", &scan::ScanTrainConfig::seed);
  py::class_<scan::EvalRow>(m, "ScanEvalRow")
      .def_readonly("epoch", &scan::EvalRow::epoch)
      .def_readonly("distance", &scan::EvalRow::distance)
      .def_readonly("curvature", &scan::EvalRow::curvature)
      .def_readonly("total", &scan::EvalRow::total);
  m.def("dataset_windows", &scan::dataset_windows, py::arg("dataset"), py::arg("k"),
        py::arg("r_norm"));
  m.def("dataset_scan_labels", &scan::dataset_scan_labels, py::arg("dataset"));
  m.def(
      "train_scan",
      [](scan::ScanNet& net, const std::vector<scan::Window>& windows,
         const std::vector<std::vector<double>>& labels, const scan::ScanTrainConfig& cfg) {
        return scan::train_scan(net, windows, labels, cfg).evals;
      },
      py::arg("net"), py::arg("windows"), py::arg("labels"), py::arg("config"));

  py::class_<odom::RotationProjection>(m, "RotationProjection")
      .def_readonly("r", &odom::RotationProjection::r)
      .def_readonly("fallback", &odom::RotationProjection::fallback);
  m.def("project_to_rotation", &odom::project_to_rotation, py::arg("six"));

  py::class_<odom::OdomNetConfig>(m, "OdomNetConfig")
      .def(py::init<>())
      .def_readwrite("window", &odom::OdomNetConfig::window)
      .def_readwrite("input_dim", &odom::OdomNetConfig::input_dim)
      .def_readwrite("scan_size", &odom::OdomNetConfig::scan_size)
      .def_readwrite("scan_norm", &odom::OdomNetConfig::scan_norm)
      .def_readwrite("conv_channels", &odom::OdomNetConfig::conv_channels)
      .def_readwrite("kernel", &odom::OdomNetConfig::kernel)
      .def_readwrite("stride", &odom::OdomNetConfig::stride)
      .def_readwrite("window_hidden", &odom::OdomNetConfig::window_hidden)
      .def_readwrite("fusion_hidden", &odom::OdomNetConfig::fusion_hidden);

  py::class_<odom::OdomNet>(m, "OdomNet")
      .def(py::init(&make_odom_net), py::arg("config") = odom::OdomNetConfig{},
           py::arg("seed") = 1)
      .def(
          "predict",
          [](const odom::OdomNet& net, const scan::Window& window,
             const std::vector<double>& prev_scan, const std::vector<double>& cur_scan) {
            bool fallback = false;
            data::Transform3 rel = net.predict(window, prev_scan, cur_scan, &fallback);
            return py::make_tuple(rel, fallback);
          },
          py::arg("window"), py::arg("prev_scan"), py::arg("cur_scan"))
      .def("num_params", [](const odom::OdomNet& n) { return n.params().total_elements(); })
      .def("save", &odom::OdomNet::save)
      .def("load", &odom::OdomNet::load);

  py::class_<odom::OdomLossParts>(m, "OdomLossParts")
      .def_readonly("translation", &odom::OdomLossParts::translation)
      .def_readonly("rotation", &odom::OdomLossParts::rotation)
      .def_readonly("total", &odom::OdomLossParts::total);
  m.def("odom_loss", &odom::odom_loss, py::arg("pred"), py::arg("label"));

  py::enum_<slam::CellState>(m, "CellState")
      .value("UNKNOWN", slam::CellState::kUnknown)
      .value("FREE", slam::CellState::kFree)
      .value("OCCUPIED", slam::CellState::kOccupied);

  py::class_<slam::OccupancyGrid>(m, "OccupancyGrid")
      .def(py::init<double>(), py::arg("resolution"))
      .def_static("world_to_cell", &slam::OccupancyGrid::world_to_cell, py::arg("coord"),
                  py::arg("resolution"))
      .def("resolution", &slam::OccupancyGrid::resolution)
      .def("integrate_beam", &slam::OccupancyGrid::integrate_beam, py::arg("ox"), py::arg("oy"),
           py::arg("ex"), py::arg("ey"), py::arg("hit"))
      .def("integrate_scan", &slam::OccupancyGrid::integrate_scan, py::arg("pose"),
           py::arg("ranges"), py::arg("max_range"))
      .def("log_odds", &slam::OccupancyGrid::log_odds, py::arg("ix"), py::arg("iy"))
      .def("state", &slam::OccupancyGrid::state, py::arg("ix"), py::arg("iy"))
      .def("occupied_cells", &slam::OccupancyGrid::occupied_cells)
      .def("update_count", &slam::OccupancyGrid::update_count);

  m.def("save_pgm", &slam::save_pgm, py::arg("grid"), py::arg("pgm_path"), py::arg("meta_path"));
  m.def("load_pgm", &slam::load_pgm, py::arg("pgm_path"), py::arg("meta_path"));
  m.def("map_overlap", &slam::map_overlap, py::arg("a"), py::arg("b"));

  py::class_<slam::OdometryScore>(m, "OdometryScore")
      .def_readonly("pass_rate", &slam::OdometryScore::pass_rate)
      .def_readonly("ate_rmse", &slam::OdometryScore::ate_rmse)
      .def_readonly("drift_percent", &slam::OdometryScore::drift_percent)
      .def_readonly("path_length", &slam::OdometryScore::path_length)
      .def_readonly("frames", &slam::OdometryScore::frames);
  m.def("odometry_score", &slam::odometry_score, py::arg("estimated"), py::arg("ground_truth"),
        py::arg("translation_tol") = 0.05, py::arg("angle_tol_deg") = 2.0);

  py::class_<slam::SlamOptions>(m, "SlamOptions")
      .def(py::init<>())
      .def_readwrite("resolution", &slam::SlamOptions::resolution)
      .def_readwrite("map_every", &slam::SlamOptions::map_every)
      .def_readwrite("use_reference_scans", &slam::SlamOptions::use_reference_scans)
      .def_readwrite("use_reference_transforms", &slam::SlamOptions::use_reference_transforms);

  py::class_<slam::SlamResult>(m, "SlamResult")
      .def_readonly("poses", &slam::SlamResult::poses)
      .def_readonly("grid", &slam::SlamResult::grid)
      .def_readonly("map_frames", &slam::SlamResult::map_frames)
      .def_readonly("map_scans", &slam::SlamResult::map_scans)
      .def_readonly("map_max_range", &slam::SlamResult::map_max_range)
      .def_readonly("frame_ms", &slam::SlamResult::frame_ms)
      .def_readonly("rotation_fallbacks", &slam::SlamResult::rotation_fallbacks)
      .def_readonly("planarity_violations", &slam::SlamResult::planarity_violations);
  m.def("run_slam", &slam::run_slam, py::arg("dataset"), py::arg("scan_net"),
        py::arg("odom_net"), py::arg("options") = slam::SlamOptions{});
}
