#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echoslam/data/dataset.hpp"
#include "echoslam/odom/odom_net.hpp"
#include "echoslam/scan/scan_net.hpp"

namespace echoslam::odom {

struct OdomTrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  // When positive, stop after any epoch whose evaluation total drops to
  // this fraction of the epoch-0 total.
  double early_stop_fraction = 0.0;
  // Train-time sigma of gaussian noise added to both scan inputs on every
  // presentation (clamped to [0, scan_norm]). Stops the scan branch from
  // keying on per-sample detail and models scan-prediction error;
  // evaluations always run noise-free.
  double scan_noise = 0.0;
  // Same idea for the ultrasonic window branch, in meters (window cells are
  // stored normalized, so the sigma is divided by the window ceiling and the
  // result clamped to [0, 1]). Fresh noise per presentation keeps the network
  // from keying on exact readings instead of interpolating between poses.
  double window_noise = 0.0;
  // Evaluate on the training set every n-th epoch (epoch 0 and the final
  // epoch always run); larger values cut evaluation cost on long runs.
  int eval_every = 1;

  void validate() const;
};

struct OdomLossRow {
  int epoch = 0;
  int step = 0;
  double translation = 0.0;
  double rotation = 0.0;
  double total = 0.0;
};

struct OdomEvalRow {
  int epoch = 0;
  double translation = 0.0;
  double rotation = 0.0;
  double total = 0.0;
};

struct OdomTrainResult {
  std::vector<OdomLossRow> steps;
  std::vector<OdomEvalRow> evals;
};

// One training pair per consecutive record pair; the label is the
// pre-integrated relative transform of the newer record.
struct OdomSample {
  scan::Window window;
  std::vector<double> prev_scan;
  std::vector<double> cur_scan;
  data::Transform3 label;
};

// Teacher forcing: pairs use the recorded reference scans.
std::vector<OdomSample> odometry_samples(const data::Dataset& ds, int k,
                                         double r_norm);

// Student pairs: scans are predicted by the given scan network from the
// recorded ultrasonic windows (each record's scan predicted once).
std::vector<OdomSample> odometry_samples(const data::Dataset& ds,
                                         const scan::ScanNet& net);

OdomEvalRow evaluate_odom(const OdomNet& net,
                          const std::vector<OdomSample>& samples, int epoch);

OdomTrainResult train_odom(OdomNet& net,
                           const std::vector<OdomSample>& samples,
                           const OdomTrainConfig& cfg);

void write_odom_loss_csv(const std::string& path,
                         const std::vector<OdomLossRow>& rows);
void write_odom_eval_csv(const std::string& path,
                         const std::vector<OdomEvalRow>& rows);

}  // namespace echoslam::odom
