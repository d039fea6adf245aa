#pragma once

#include <vector>

#include "echoslam/nn/rng.hpp"
#include "echoslam/nn/tensor.hpp"

namespace testutil {

inline echoslam::nn::Tensor rand_tensor(echoslam::nn::Rng& rng,
                                        std::vector<int> shape,
                                        double lo = -1.0, double hi = 1.0) {
  echoslam::nn::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Values bounded away from zero, random sign.
inline echoslam::nn::Tensor rand_nonzero(echoslam::nn::Rng& rng,
                                         std::vector<int> shape,
                                         double lo = 0.4, double hi = 1.4) {
  echoslam::nn::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    t[i] = sign * rng.uniform(lo, hi);
  }
  return t;
}

}  // namespace testutil
