#pragma once

#include <string>
#include <vector>

#include "echoslam/nn/layers.hpp"
#include "echoslam/scan/window.hpp"

namespace echoslam::nn {
class Rng;
}

namespace echoslam::scan {

// Transformer that upsamples a [window, 12] block of normalized ultrasonic
// readings to a dense 720-beam scan. Output ranges live in (0, out_scale).
struct ScanNetConfig {
  int window = 3;
  int input_dim = 12;
  int d_model = 64;
  int heads = 4;
  int blocks = 2;
  int mlp_hidden = 128;
  int output_size = 720;
  double out_scale = 8.0;
  int curvature_neighbor = 1;
  double curvature_weight = 1.0;

  void validate() const;
};

class ScanNet {
 public:
  ScanNet(const ScanNetConfig& cfg, nn::Rng& rng);

  // Builds the graph for one window; gradients flow into the parameters.
  nn::Value forward(const nn::Tensor& window) const;

  // Forward values only.
  std::vector<double> predict(const nn::Tensor& window) const;
  std::vector<double> predict(const Window& window) const;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const ScanNetConfig& config() const { return cfg_; }

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  ScanNetConfig cfg_;
  nn::ParameterSet params_;
};

}  // namespace echoslam::scan
