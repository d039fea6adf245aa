#include "echoslam/odom/odom_net.hpp"

#include <cstddef>
#include <string>

#include "echoslam/errors.hpp"
#include "echoslam/nn/checkpoint.hpp"
#include "echoslam/nn/rng.hpp"
#include "echoslam/odom/rotation.hpp"

namespace echoslam::odom {

void OdomNetConfig::validate() const {
  if (window <= 0) throw ConfigError("window must be positive");
  if (input_dim <= 0) throw ConfigError("input_dim must be positive");
  if (scan_size <= 0) throw ConfigError("scan_size must be positive");
  if (scan_norm <= 0) throw ConfigError("scan_norm must be positive");
  if (conv_channels.empty()) throw ConfigError("conv stack must be non-empty");
  for (int c : conv_channels) {
    if (c <= 0) throw ConfigError("conv channels must be positive");
  }
  if (kernel <= 0 || kernel % 2 == 0) {
    throw ConfigError("kernel must be odd and positive");
  }
  if (stride <= 0) throw ConfigError("stride must be positive");
  int len = scan_size;
  for (std::size_t i = 0; i < conv_channels.size(); ++i) {
    if (len % stride != 0) {
      throw ConfigError("scan_size must be divisible by the conv strides");
    }
    len /= stride;
  }
  if (window_hidden <= 0) throw ConfigError("window_hidden must be positive");
  if (fusion_hidden <= 0) throw ConfigError("fusion_hidden must be positive");
}

OdomNet::OdomNet(const OdomNetConfig& cfg, nn::Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  int in_ch = 2;
  for (std::size_t i = 0; i < cfg_.conv_channels.size(); ++i) {
    const int out_ch = cfg_.conv_channels[i];
    const std::string prefix = "conv" + std::to_string(i);
    params_.add(prefix + ".w",
                nn::Tensor::uniform_fan_in({out_ch, in_ch, cfg_.kernel},
                                           in_ch * cfg_.kernel, rng));
    params_.add(prefix + ".b", nn::Tensor::zeros({1, out_ch}));
    in_ch = out_ch;
  }
  nn::add_linear(params_, "win", cfg_.window * cfg_.input_dim,
                 cfg_.window_hidden, rng);
  nn::add_linear(params_, "fuse", cfg_.conv_channels.back() + cfg_.window_hidden,
                 cfg_.fusion_hidden, rng);
  nn::add_linear(params_, "disp", cfg_.fusion_hidden, 3, rng);
  nn::add_linear(params_, "rot", cfg_.fusion_hidden, 6, rng);
}

OdomOutput OdomNet::forward(const nn::Tensor& window,
                            const nn::Tensor& scans) const {
  if (window.rank() != 2 || window.dim(0) != cfg_.window ||
      window.dim(1) != cfg_.input_dim) {
    throw ConfigError("odom net expects a [window, input_dim] tensor");
  }
  if (scans.rank() != 2 || scans.dim(0) != 2 ||
      scans.dim(1) != cfg_.scan_size) {
    throw ConfigError("odom net expects a [2, scan_size] tensor");
  }

  nn::Value x = nn::scale(nn::Value::constant(scans), 1.0 / cfg_.scan_norm);
  for (std::size_t i = 0; i < cfg_.conv_channels.size(); ++i) {
    const std::string prefix = "conv" + std::to_string(i);
    x = nn::conv1d_circular(x, params_.get(prefix + ".w"),
                            params_.get(prefix + ".b"), cfg_.stride);
    x = nn::gelu(x);
  }
  nn::Value scan_feat = nn::global_avg_pool(x);

  nn::Value win = nn::flatten_row(nn::Value::constant(window));
  nn::Value win_feat = nn::gelu(nn::linear(win, params_, "win"));

  nn::Value fused = nn::gelu(
      nn::linear(nn::hcat({scan_feat, win_feat}), params_, "fuse"));

  OdomOutput out;
  out.disp = nn::linear(fused, params_, "disp");
  out.rot6 = nn::linear(fused, params_, "rot");
  return out;
}

data::Transform3 OdomNet::predict(const scan::Window& window,
                                  const std::vector<double>& prev_scan,
                                  const std::vector<double>& cur_scan,
                                  bool* fallback) const {
  OdomOutput out = forward(scan::window_tensor(window),
                           scans_tensor(prev_scan, cur_scan));
  const nn::Tensor& d = out.disp.tensor();
  const nn::Tensor& r6 = out.rot6.tensor();

  std::array<double, 6> cols;
  for (int i = 0; i < 6; ++i) cols[static_cast<std::size_t>(i)] = r6[i];
  RotationProjection proj = project_to_rotation(cols);
  if (fallback) *fallback = proj.fallback;

  data::Transform3 rel;
  for (int i = 0; i < 3; ++i) rel.t[static_cast<std::size_t>(i)] = d[i];
  rel.R = proj.r;
  return rel;
}

void OdomNet::save(const std::string& path) const {
  nn::save_checkpoint(params_, path);
}

void OdomNet::load(const std::string& path) {
  nn::load_checkpoint(params_, path);
}

nn::Tensor scans_tensor(const std::vector<double>& prev_scan,
                        const std::vector<double>& cur_scan) {
  if (prev_scan.size() != cur_scan.size() || prev_scan.empty()) {
    throw ConfigError("scan pair must be non-empty and equal-length");
  }
  const int len = static_cast<int>(prev_scan.size());
  nn::Tensor t = nn::Tensor::zeros({2, len});
  for (int j = 0; j < len; ++j) {
    t.at(0, j) = prev_scan[static_cast<std::size_t>(j)];
    t.at(1, j) = cur_scan[static_cast<std::size_t>(j)];
  }
  return t;
}

OdomLossParts odom_loss(const data::Transform3& pred,
                        const data::Transform3& label) {
  OdomLossParts parts;
  for (int i = 0; i < 3; ++i) {
    const double d = pred.t[static_cast<std::size_t>(i)] -
                     label.t[static_cast<std::size_t>(i)];
    parts.translation += d * d;
  }
  parts.translation /= 3.0;
  for (int i = 0; i < 9; ++i) {
    const double d = pred.R[static_cast<std::size_t>(i)] -
                     label.R[static_cast<std::size_t>(i)];
    parts.rotation += d * d;
  }
  parts.rotation /= 9.0;
  parts.total = parts.translation + parts.rotation;
  return parts;
}

nn::Value odom_loss_value(const OdomOutput& out, const data::Transform3& label,
                          nn::Value* translation_term,
                          nn::Value* rotation_term) {
  using nn::Tensor;
  using nn::Value;
  Tensor t_label = Tensor::from(
      {1, 3}, std::vector<double>(label.t.begin(), label.t.end()));
  Tensor r_label = Tensor::from(
      {1, 9}, std::vector<double>(label.R.begin(), label.R.end()));

  Value dt = nn::sub(out.disp, Value::constant(t_label));
  Value translation = nn::mean_all(nn::mul(dt, dt));

  Value rot9 = project_to_rotation_value(out.rot6);
  Value dr = nn::sub(rot9, Value::constant(r_label));
  Value rotation = nn::mean_all(nn::mul(dr, dr));

  if (translation_term) *translation_term = translation;
  if (rotation_term) *rotation_term = rotation;
  return nn::add(translation, rotation);
}

}  // namespace echoslam::odom
