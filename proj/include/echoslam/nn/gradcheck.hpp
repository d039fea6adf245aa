#pragma once

#include <functional>
#include <string>
#include <vector>

#include "echoslam/nn/graph.hpp"

namespace echoslam::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_element;

  bool pass(double tol = 1e-3) const { return max_rel_error < tol; }
};

// Central-difference gradient check.
//
// `fn` must rebuild the computation from the current leaf values and return
// a scalar; `leaves` are the tensors to perturb (they must participate in
// the graph `fn` builds, i.e. fn closes over these Values). Per element the
// relative error is |a - n| / max(|a|, |n|, 1e-6) with a the analytic and n
// the numeric derivative at step h.
GradCheckResult grad_check(const std::function<Value()>& fn,
                           const std::vector<Value>& leaves,
                           double h = 1e-3);

}  // namespace echoslam::nn
