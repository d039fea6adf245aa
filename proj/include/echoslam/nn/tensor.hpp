#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace echoslam::nn {

class Rng;

// Dense row-major tensor of doubles. Rank is 1, 2, or 3 in practice
// (vectors, matrices, conv filter banks). Cheap value semantics; sizes in
// this project are at most a few hundred thousand elements.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double value);
  static Tensor from(std::vector<int> shape, std::vector<double> values);
  static Tensor scalar(double value);

  // U(-sqrt(1/fan_in), +sqrt(1/fan_in)); the default weight initializer.
  static Tensor uniform_fan_in(std::vector<int> shape, int fan_in, Rng& rng);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // 2-D access; bounds are the caller's responsibility.
  double& at(int r, int c) {
    return data_[static_cast<std::size_t>(r) * shape_[1] + c];
  }
  double at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * shape_[1] + c];
  }

  // 3-D access for conv filter banks shaped {out, in, k}.
  double& at(int a, int b, int c) {
    return data_[(static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] + c];
  }
  double at(int a, int b, int c) const {
    return data_[(static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] + c];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void fill(double value);

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

}  // namespace echoslam::nn
