#include "echoslam/odom/train.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

#include "echoslam/errors.hpp"
#include "echoslam/nn/adam.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/scan/train.hpp"
#include "echoslam/util/csv.hpp"

namespace echoslam::odom {

void OdomTrainConfig::validate() const {
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (lr <= 0) throw ConfigError("lr must be positive");
  if (early_stop_fraction < 0) throw ConfigError("early_stop_fraction must be non-negative");
  if (scan_noise < 0) throw ConfigError("scan_noise must be non-negative");
  if (window_noise < 0) throw ConfigError("window_noise must be non-negative");
  if (eval_every <= 0) throw ConfigError("eval_every must be positive");
}

namespace {

std::vector<OdomSample> make_samples(
    const data::Dataset& ds, const std::vector<scan::Window>& windows,
    const std::vector<std::vector<double>>& scans) {
  if (ds.records.size() < 2) {
    throw DataError("odometry needs at least two records");
  }
  std::vector<OdomSample> out;
  out.reserve(ds.records.size() - 1);
  for (std::size_t i = 1; i < ds.records.size(); ++i) {
    OdomSample s;
    s.window = windows[i];
    s.prev_scan = scans[i - 1];
    s.cur_scan = scans[i];
    s.label = ds.records[i].rel;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<OdomSample> odometry_samples(const data::Dataset& ds, int k,
                                         double r_norm) {
  auto windows = scan::dataset_windows(ds, k, r_norm);
  auto scans = scan::dataset_scan_labels(ds);
  return make_samples(ds, windows, scans);
}

std::vector<OdomSample> odometry_samples(const data::Dataset& ds,
                                         const scan::ScanNet& net) {
  const scan::ScanNetConfig& nc = net.config();
  auto windows = scan::dataset_windows(ds, nc.window, ds.info.sensor.r_max);
  std::vector<std::vector<double>> scans;
  scans.reserve(windows.size());
  for (const auto& w : windows) scans.push_back(net.predict(w));
  return make_samples(ds, windows, scans);
}

OdomEvalRow evaluate_odom(const OdomNet& net,
                          const std::vector<OdomSample>& samples, int epoch) {
  if (samples.empty()) throw ConfigError("evaluation needs samples");
  OdomEvalRow row;
  row.epoch = epoch;
  for (const auto& s : samples) {
    const data::Transform3 pred =
        net.predict(s.window, s.prev_scan, s.cur_scan);
    const OdomLossParts parts = odom_loss(pred, s.label);
    row.translation += parts.translation;
    row.rotation += parts.rotation;
    row.total += parts.total;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  row.translation *= inv;
  row.rotation *= inv;
  row.total *= inv;
  return row;
}

OdomTrainResult train_odom(OdomNet& net,
                           const std::vector<OdomSample>& samples,
                           const OdomTrainConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ConfigError("training needs samples");
  const OdomNetConfig& nc = net.config();
  for (const auto& s : samples) {
    if (static_cast<int>(s.prev_scan.size()) != nc.scan_size ||
        static_cast<int>(s.cur_scan.size()) != nc.scan_size) {
      throw ConfigError("sample scan size does not match the network");
    }
  }

  OdomTrainResult result;
  result.evals.push_back(evaluate_odom(net, samples, 0));

  nn::Adam opt(net.params(), {cfg.lr, 0.9, 0.999, 1e-8});
  nn::Rng shuffle_rng(cfg.seed);
  nn::Rng noise_rng(cfg.seed + 1);
  std::vector<std::size_t> order(samples.size());
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
      double t_sum = 0.0;
      double r_sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const OdomSample& s = samples[order[i]];
        nn::Tensor win_t;
        if (cfg.window_noise > 0) {
          scan::Window w = s.window;
          const double sigma = cfg.window_noise / w.r_norm;
          for (auto& v : w.values) {
            v = std::clamp(v + sigma * noise_rng.gaussian(), 0.0, 1.0);
          }
          win_t = scan::window_tensor(w);
        } else {
          win_t = scan::window_tensor(s.window);
        }
        nn::Tensor scans_t;
        if (cfg.scan_noise > 0) {
          std::vector<double> prev = s.prev_scan;
          std::vector<double> cur = s.cur_scan;
          for (auto& v : prev) {
            v = std::clamp(v + cfg.scan_noise * noise_rng.gaussian(), 0.0,
                           nc.scan_norm);
          }
          for (auto& v : cur) {
            v = std::clamp(v + cfg.scan_noise * noise_rng.gaussian(), 0.0,
                           nc.scan_norm);
          }
          scans_t = scans_tensor(prev, cur);
        } else {
          scans_t = scans_tensor(s.prev_scan, s.cur_scan);
        }
        OdomOutput out = net.forward(win_t, scans_t);
        nn::Value t_term, r_term;
        nn::Value sample = odom_loss_value(out, s.label, &t_term, &r_term);
        t_sum += t_term.scalar();
        r_sum += r_term.scalar();
        batch_loss = batch_loss.defined() ? nn::add(batch_loss, sample)
                                          : sample;
      }
      batch_loss = nn::scale(batch_loss, inv);
      batch_loss.backward();
      opt.step();

      OdomLossRow row;
      row.epoch = epoch;
      row.step = step++;
      row.translation = t_sum * inv;
      row.rotation = r_sum * inv;
      row.total = batch_loss.scalar();
      result.steps.push_back(row);
    }
    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      result.evals.push_back(evaluate_odom(net, samples, epoch));
      if (cfg.early_stop_fraction > 0 &&
          result.evals.back().total <=
              cfg.early_stop_fraction * result.evals.front().total) {
        break;
      }
    }
  }
  return result;
}

void write_odom_loss_csv(const std::string& path,
                         const std::vector<OdomLossRow>& rows) {
  std::vector<std::vector<double>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) {
    cells.push_back({static_cast<double>(r.epoch), static_cast<double>(r.step),
                     r.translation, r.rotation, r.total});
  }
  util::write_csv(path, "epoch,step,translation,rotation,total", cells);
}

void write_odom_eval_csv(const std::string& path,
                         const std::vector<OdomEvalRow>& rows) {
  std::vector<std::vector<double>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) {
    cells.push_back(
        {static_cast<double>(r.epoch), r.translation, r.rotation, r.total});
  }
  util::write_csv(path, "epoch,translation,rotation,total", cells);
}

}  // namespace echoslam::odom
