#include "echoslam/nn/tensor.hpp"

#include <cmath>
#include <string>

#include "echoslam/errors.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::nn {

std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ConfigError("tensor dimension must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(shape_numel(shape_), 0.0);
}

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
  Tensor t(std::move(shape));
  if (values.size() != t.size()) {
    throw ConfigError("tensor data size does not match shape " +
                      shape_str(t.shape()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) t[i] = values[i];
  return t;
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

Tensor Tensor::uniform_fan_in(std::vector<int> shape, int fan_in, Rng& rng) {
  if (fan_in <= 0) throw ConfigError("uniform_fan_in: fan_in must be positive");
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

}  // namespace echoslam::nn
