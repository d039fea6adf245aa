#include "echoslam/scan/train.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

#include "echoslam/errors.hpp"
#include "echoslam/nn/adam.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/scan/curvature.hpp"
#include "echoslam/util/csv.hpp"

namespace echoslam::scan {

void ScanTrainConfig::validate() const {
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (lr <= 0) throw ConfigError("lr must be positive");
  if (early_stop_fraction < 0) throw ConfigError("early_stop_fraction must be non-negative");
}

std::vector<Window> dataset_windows(const data::Dataset& ds, int k,
                                    double r_norm) {
  if (ds.records.empty()) throw DataError("dataset has no records");
  std::vector<Window> out;
  out.reserve(ds.records.size());
  Window w = Window::cold_start(ds.records.front().ultra, k, r_norm);
  out.push_back(w);
  for (std::size_t i = 1; i < ds.records.size(); ++i) {
    w = window_push(w, ds.records[i].ultra);
    out.push_back(w);
  }
  return out;
}

std::vector<std::vector<double>> dataset_scan_labels(const data::Dataset& ds) {
  std::vector<std::vector<double>> out;
  out.reserve(ds.records.size());
  for (const auto& rec : ds.records) out.push_back(rec.scan);
  return out;
}

EvalRow evaluate_scan(const ScanNet& net, const std::vector<Window>& windows,
                      const std::vector<std::vector<double>>& labels,
                      int epoch) {
  if (windows.empty() || windows.size() != labels.size()) {
    throw ConfigError("evaluation needs matching windows and labels");
  }
  const ScanNetConfig& nc = net.config();
  EvalRow row;
  row.epoch = epoch;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const ScanLossParts parts =
        scan_loss(net.predict(windows[i]), labels[i], nc.curvature_neighbor,
                  nc.curvature_weight);
    row.distance += parts.distance;
    row.curvature += parts.curvature;
    row.total += parts.total;
  }
  const double inv = 1.0 / static_cast<double>(windows.size());
  row.distance *= inv;
  row.curvature *= inv;
  row.total *= inv;
  return row;
}

ScanTrainResult train_scan(ScanNet& net, const std::vector<Window>& windows,
                           const std::vector<std::vector<double>>& labels,
                           const ScanTrainConfig& cfg) {
  cfg.validate();
  if (windows.empty() || windows.size() != labels.size()) {
    throw ConfigError("training needs matching windows and labels");
  }
  const ScanNetConfig& nc = net.config();
  for (const auto& label : labels) {
    if (static_cast<int>(label.size()) != nc.output_size) {
      throw ConfigError("label scan size does not match the network");
    }
  }

  ScanTrainResult result;
  result.evals.push_back(evaluate_scan(net, windows, labels, 0));

  nn::Adam opt(net.params(), {cfg.lr, 0.9, 0.999, 1e-8});
  nn::Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(windows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  int step = 1;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = shuffle_rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(begin + static_cast<std::size_t>(cfg.batch_size),
                   order.size());
      const double inv = 1.0 / static_cast<double>(end - begin);

      net.params().zero_grad();
      nn::Value batch_loss;
      double dist_sum = 0.0;
      double curv_sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t idx = order[i];
        nn::Value dist, curv;
        nn::Value sample = scan_loss_value(
            net.forward(window_tensor(windows[idx])), labels[idx],
            nc.curvature_neighbor, nc.curvature_weight, &dist, &curv);
        dist_sum += dist.scalar();
        curv_sum += curv.scalar();
        batch_loss = batch_loss.defined() ? nn::add(batch_loss, sample)
                                          : sample;
      }
      batch_loss = nn::scale(batch_loss, inv);
      batch_loss.backward();
      opt.step();

      LossRow row;
      row.epoch = epoch;
      row.step = step++;
      row.distance = dist_sum * inv;
      row.curvature = curv_sum * inv;
      row.total = batch_loss.scalar();
      result.steps.push_back(row);
    }
    result.evals.push_back(evaluate_scan(net, windows, labels, epoch));
    if (cfg.early_stop_fraction > 0 &&
        result.evals.back().total <=
            cfg.early_stop_fraction * result.evals.front().total) {
      break;
    }
  }
  return result;
}

void write_loss_csv(const std::string& path,
                    const std::vector<LossRow>& rows) {
  std::vector<std::vector<double>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) {
    cells.push_back({static_cast<double>(r.epoch), static_cast<double>(r.step),
                     r.distance, r.curvature, r.total});
  }
  util::write_csv(path, "epoch,step,distance,curvature,total", cells);
}

void write_eval_csv(const std::string& path,
                    const std::vector<EvalRow>& rows) {
  std::vector<std::vector<double>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) {
    cells.push_back(
        {static_cast<double>(r.epoch), r.distance, r.curvature, r.total});
  }
  util::write_csv(path, "epoch,distance,curvature,total", cells);
}

}  // namespace echoslam::scan
