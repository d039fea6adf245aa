#pragma once

#include <cstdint>
#include <vector>

#include "echoslam/nn/layers.hpp"

namespace echoslam::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are ordered like the parameter
// set, so two runs over the same parameters and gradients are bitwise equal.
class Adam {
 public:
  explicit Adam(ParameterSet& params, AdamConfig cfg = {});

  // Applies one update from the currently accumulated gradients, then
  // leaves the gradients untouched (call params().zero_grad() afterwards).
  void step();

  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  ParameterSet& params() { return *params_; }

 private:
  ParameterSet* params_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace echoslam::nn
