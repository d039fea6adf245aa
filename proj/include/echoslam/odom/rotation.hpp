#pragma once

#include <array>

#include "echoslam/nn/graph.hpp"

namespace echoslam::odom {

// Projects two free 3-vectors (the raw [1,6] rotation head output, columns
// stacked as a then b) onto SO(3) by Gram-Schmidt: the columns of R are
// normalize(a), normalize(b - <u1,b> u1) and their cross product. Output is
// row-major. Near-degenerate inputs (zero or parallel columns) fall back to
// the identity and set the flag.
struct RotationProjection {
  std::array<double, 9> r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  bool fallback = false;
};

RotationProjection project_to_rotation(const std::array<double, 6>& cols);

// Differentiable projection of a [1,6] value to a row-major [1,9] rotation.
// Norms are guarded with a tiny epsilon instead of branching, so inputs are
// assumed non-degenerate (training data keeps them so).
nn::Value project_to_rotation_value(const nn::Value& six);

}  // namespace echoslam::odom
