#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "echoslam/data/dataset.hpp"
#include "echoslam/scan/scan_net.hpp"

namespace echoslam::scan {

struct ScanTrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  // When positive, stop after any epoch whose evaluation total drops to
  // this fraction of the epoch-0 total.
  double early_stop_fraction = 0.0;

  void validate() const;
};

// One optimizer step; distance/curvature/total are batch means.
struct LossRow {
  int epoch = 0;
  int step = 0;
  double distance = 0.0;
  double curvature = 0.0;
  double total = 0.0;
};

// Full-dataset evaluation; epoch 0 is the untrained model.
struct EvalRow {
  int epoch = 0;
  double distance = 0.0;
  double curvature = 0.0;
  double total = 0.0;
};

struct ScanTrainResult {
  std::vector<LossRow> steps;
  std::vector<EvalRow> evals;
};

// One window per record; the first record cold-starts the buffer.
std::vector<Window> dataset_windows(const data::Dataset& ds, int k,
                                    double r_norm);
std::vector<std::vector<double>> dataset_scan_labels(const data::Dataset& ds);

EvalRow evaluate_scan(const ScanNet& net, const std::vector<Window>& windows,
                      const std::vector<std::vector<double>>& labels,
                      int epoch);

ScanTrainResult train_scan(ScanNet& net, const std::vector<Window>& windows,
                           const std::vector<std::vector<double>>& labels,
                           const ScanTrainConfig& cfg);

void write_loss_csv(const std::string& path, const std::vector<LossRow>& rows);
void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows);

}  // namespace echoslam::scan
