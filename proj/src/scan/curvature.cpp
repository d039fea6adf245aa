#include "echoslam/scan/curvature.hpp"

#include <cmath>
#include <cstddef>

#include "echoslam/errors.hpp"
#include "echoslam/sim/lidar.hpp"

namespace echoslam::scan {

namespace {

constexpr double kSideEps = 1e-6;
constexpr double kAreaEps = 1e-12;
// Keeps sqrt differentiable when a side collapses; the result of those
// beams is masked to zero anyway.
constexpr double kSqrtGuard = 1e-30;

struct Triangle {
  double a = 0.0;     // |p_prev - p_mid|
  double b = 0.0;     // |p_mid - p_next|
  double c = 0.0;     // |p_next - p_prev|
  double area = 0.0;  // unsigned triangle area
  bool degenerate = true;
};

Triangle triangle_at(const std::vector<double>& ranges, int i, int n) {
  const int beams = static_cast<int>(ranges.size());
  auto point = [&](int idx) {
    const int j = ((idx % beams) + beams) % beams;
    const double ang = j * sim::kScanStepRad;
    return std::pair<double, double>{ranges[static_cast<std::size_t>(j)] *
                                         std::cos(ang),
                                     ranges[static_cast<std::size_t>(j)] *
                                         std::sin(ang)};
  };
  const auto [x1, y1] = point(i - n);
  const auto [x2, y2] = point(i);
  const auto [x3, y3] = point(i + n);

  Triangle t;
  t.a = std::hypot(x2 - x1, y2 - y1);
  t.b = std::hypot(x3 - x2, y3 - y2);
  t.c = std::hypot(x3 - x1, y3 - y1);
  const double cross = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1);
  t.area = 0.5 * std::fabs(cross);
  t.degenerate = t.a < kSideEps || t.b < kSideEps || t.c < kSideEps ||
                 t.area < kAreaEps;
  return t;
}

void check_profile_args(std::size_t beams, int n) {
  if (beams < 3) throw ConfigError("curvature needs at least three beams");
  if (n <= 0 || 2 * n >= static_cast<int>(beams)) {
    throw ConfigError("curvature neighbor offset out of range");
  }
}

}  // namespace

double menger_curvature(const std::vector<double>& ranges, int i, int n) {
  check_profile_args(ranges.size(), n);
  if (i < 0 || i >= static_cast<int>(ranges.size())) {
    throw ConfigError("curvature beam index out of range");
  }
  const Triangle t = triangle_at(ranges, i, n);
  if (t.degenerate) return 0.0;
  return 4.0 * t.area / (t.a * t.b * t.c);
}

std::vector<double> curvature_profile(const std::vector<double>& ranges,
                                      int n) {
  check_profile_args(ranges.size(), n);
  std::vector<double> out(ranges.size(), 0.0);
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const Triangle t = triangle_at(ranges, static_cast<int>(i), n);
    if (!t.degenerate) out[i] = 4.0 * t.area / (t.a * t.b * t.c);
  }
  return out;
}

nn::Value curvature_profile_value(const nn::Value& ranges, int n) {
  using nn::Tensor;
  using nn::Value;
  const Tensor& rv = ranges.tensor();
  if (rv.rank() != 2 || rv.dim(0) != 1) {
    throw ConfigError("curvature expects a [1, beams] tensor");
  }
  const int beams = rv.dim(1);
  check_profile_args(static_cast<std::size_t>(beams), n);

  auto trig = [&](int offset, bool is_sin) {
    Tensor t = Tensor::zeros({1, beams});
    for (int j = 0; j < beams; ++j) {
      const int src = ((j + offset) % beams + beams) % beams;
      const double ang = src * sim::kScanStepRad;
      t[static_cast<std::size_t>(j)] = is_sin ? std::sin(ang) : std::cos(ang);
    }
    return t;
  };

  // Rolled copies align each beam with its two neighbors: prev[:,j] holds
  // range j-n, next[:,j] holds range j+n.
  Value prev = roll_cols(ranges, n);
  Value next = roll_cols(ranges, -n);
  Value x1 = mul_const(prev, trig(-n, false));
  Value y1 = mul_const(prev, trig(-n, true));
  Value x2 = mul_const(ranges, trig(0, false));
  Value y2 = mul_const(ranges, trig(0, true));
  Value x3 = mul_const(next, trig(n, false));
  Value y3 = mul_const(next, trig(n, true));

  Value ux = sub(x2, x1);
  Value uy = sub(y2, y1);
  Value vx = sub(x3, x1);
  Value vy = sub(y3, y1);
  Value wx = sub(x3, x2);
  Value wy = sub(y3, y2);

  Tensor guard = Tensor::full({1, beams}, kSqrtGuard);
  Value side_a = sqrtv(add_const(add(mul(ux, ux), mul(uy, uy)), guard));
  Value side_b = sqrtv(add_const(add(mul(wx, wx), mul(wy, wy)), guard));
  Value side_c = sqrtv(add_const(add(mul(vx, vx), mul(vy, vy)), guard));
  Value cross = sub(mul(ux, vy), mul(uy, vx));
  Value four_area = scale(absv(cross), 2.0);

  // Degeneracy mask from the forward values; masked beams report zero and
  // pass no gradient.
  std::vector<double> plain(rv.data(), rv.data() + rv.size());
  Tensor mask = Tensor::zeros({1, beams});
  Tensor denom_fill = Tensor::zeros({1, beams});
  for (int j = 0; j < beams; ++j) {
    const bool keep = !triangle_at(plain, j, n).degenerate;
    mask[static_cast<std::size_t>(j)] = keep ? 1.0 : 0.0;
    denom_fill[static_cast<std::size_t>(j)] = keep ? 0.0 : 1.0;
  }

  Value abc = mul(mul(side_a, side_b), side_c);
  Value denom_safe = add_const(mul_const(abc, mask), denom_fill);
  return mul_const(divv(four_area, denom_safe), mask);
}

ScanLossParts scan_loss(const std::vector<double>& pred,
                        const std::vector<double>& label, int n,
                        double lambda) {
  if (pred.size() != label.size()) {
    throw ConfigError("scan loss needs equal-length scans");
  }
  check_profile_args(pred.size(), n);
  ScanLossParts parts;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - label[i];
    parts.distance += d * d;
  }
  parts.distance /= static_cast<double>(pred.size());
  const std::vector<double> kp = curvature_profile(pred, n);
  const std::vector<double> kl = curvature_profile(label, n);
  for (std::size_t i = 0; i < kp.size(); ++i) {
    const double d = kp[i] - kl[i];
    parts.curvature += d * d;
  }
  parts.curvature /= static_cast<double>(kp.size());
  parts.total = parts.distance + lambda * parts.curvature;
  return parts;
}

nn::Value scan_loss_value(const nn::Value& pred,
                          const std::vector<double>& label, int n,
                          double lambda, nn::Value* distance_term,
                          nn::Value* curvature_term) {
  using nn::Tensor;
  using nn::Value;
  const Tensor& pv = pred.tensor();
  if (pv.rank() != 2 || pv.dim(0) != 1 ||
      pv.dim(1) != static_cast<int>(label.size())) {
    throw ConfigError("scan loss prediction/label shape mismatch");
  }
  const int beams = pv.dim(1);

  Tensor label_t = Tensor::from({1, beams}, label);
  Value diff = sub(pred, Value::constant(label_t));
  Value distance = mean_all(mul(diff, diff));

  Value kp = curvature_profile_value(pred, n);
  Tensor kl = Tensor::from({1, beams}, curvature_profile(label, n));
  Value kdiff = sub(kp, Value::constant(kl));
  Value curvature = mean_all(mul(kdiff, kdiff));

  if (distance_term) *distance_term = distance;
  if (curvature_term) *curvature_term = curvature;
  return add(distance, scale(curvature, lambda));
}

}  // namespace echoslam::scan
