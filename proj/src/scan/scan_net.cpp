#include "echoslam/scan/scan_net.hpp"

#include <cstddef>

#include "echoslam/errors.hpp"
#include "echoslam/nn/checkpoint.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::scan {

void ScanNetConfig::validate() const {
  if (window <= 0) throw ConfigError("window must be positive");
  if (input_dim <= 0) throw ConfigError("input_dim must be positive");
  if (d_model <= 0 || heads <= 0 || d_model % heads != 0) {
    throw ConfigError("d_model must be a positive multiple of heads");
  }
  if (blocks <= 0) throw ConfigError("blocks must be positive");
  if (mlp_hidden <= 0) throw ConfigError("mlp_hidden must be positive");
  if (output_size < 3) throw ConfigError("output_size must be at least 3");
  if (out_scale <= 0) throw ConfigError("out_scale must be positive");
  if (curvature_neighbor <= 0 ||
      2 * curvature_neighbor >= output_size) {
    throw ConfigError("curvature_neighbor out of range");
  }
  if (curvature_weight < 0) {
    throw ConfigError("curvature_weight must be non-negative");
  }
}

ScanNet::ScanNet(const ScanNetConfig& cfg, nn::Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  nn::add_linear(params_, "embed", cfg_.input_dim, cfg_.d_model, rng);
  params_.add("pos", nn::Tensor::uniform_fan_in({cfg_.window, cfg_.d_model},
                                                cfg_.d_model, rng));
  for (int b = 0; b < cfg_.blocks; ++b) {
    nn::add_encoder_block(params_, "block" + std::to_string(b), cfg_.d_model,
                          cfg_.mlp_hidden, rng);
  }
  nn::add_layer_norm(params_, "final_ln", cfg_.d_model);
  nn::add_linear(params_, "head", cfg_.window * cfg_.d_model,
                 cfg_.output_size, rng);
}

nn::Value ScanNet::forward(const nn::Tensor& window) const {
  if (window.rank() != 2 || window.dim(0) != cfg_.window ||
      window.dim(1) != cfg_.input_dim) {
    throw ConfigError("scan net expects a [window, input_dim] tensor");
  }
  nn::Value x = nn::Value::constant(window);
  x = nn::add(nn::linear(x, params_, "embed"), params_.get("pos"));
  for (int b = 0; b < cfg_.blocks; ++b) {
    x = nn::encoder_block(x, params_, "block" + std::to_string(b),
                          cfg_.heads);
  }
  x = nn::layer_norm(x, params_, "final_ln");
  nn::Value flat = nn::flatten_row(x);
  nn::Value logits = nn::linear(flat, params_, "head");
  return nn::scale(nn::sigmoid(logits), cfg_.out_scale);
}

std::vector<double> ScanNet::predict(const nn::Tensor& window) const {
  nn::Value out = forward(window);
  const nn::Tensor& t = out.tensor();
  return std::vector<double>(t.data(), t.data() + t.size());
}

std::vector<double> ScanNet::predict(const Window& window) const {
  return predict(window_tensor(window));
}

void ScanNet::save(const std::string& path) const {
  nn::save_checkpoint(params_, path);
}

void ScanNet::load(const std::string& path) {
  nn::load_checkpoint(params_, path);
}

}  // namespace echoslam::scan
