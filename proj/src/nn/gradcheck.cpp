#include "echoslam/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "echoslam/errors.hpp"

namespace echoslam::nn {

GradCheckResult grad_check(const std::function<Value()>& fn,
                           const std::vector<Value>& leaves, double h) {
  for (const auto& leaf : leaves) {
    if (!leaf.node()->requires_grad) {
      throw ConfigError("grad_check: leaf '" + leaf.node()->name +
                        "' does not require gradients");
    }
    leaf.node()->grad = Tensor();
  }

  Value out = fn();
  out.backward();

  std::vector<Tensor> analytic;
  analytic.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    if (!leaf.node()->has_grad()) {
      // Leaf unused by fn: its analytic gradient is identically zero.
      analytic.push_back(Tensor::zeros(leaf.tensor().shape()));
    } else {
      analytic.push_back(leaf.node()->grad);
    }
  }

  GradCheckResult result;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    Tensor& t = leaves[li].node()->value;
    const std::string label =
        leaves[li].node()->name.empty() ? ("leaf" + std::to_string(li))
                                        : leaves[li].node()->name;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double orig = t[j];
      t[j] = orig + h;
      const double f_plus = fn().scalar();
      t[j] = orig - h;
      const double f_minus = fn().scalar();
      t[j] = orig;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double a = analytic[li][j];
      const double rel = std::fabs(a - numeric) /
                         std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_element = label + "[" + std::to_string(j) + "]";
      }
    }
  }
  return result;
}

}  // namespace echoslam::nn
