#include "echoslam/odom/rotation.hpp"

#include <cmath>

#include "echoslam/errors.hpp"

namespace echoslam::odom {

namespace {

constexpr double kDegenerateEps = 1e-9;
constexpr double kNormGuard = 1e-24;

}  // namespace

RotationProjection project_to_rotation(const std::array<double, 6>& cols) {
  RotationProjection out;
  const double ax = cols[0], ay = cols[1], az = cols[2];
  const double bx = cols[3], by = cols[4], bz = cols[5];

  const double na = std::sqrt(ax * ax + ay * ay + az * az);
  if (na < kDegenerateEps) {
    out.fallback = true;
    return out;
  }
  const double u1x = ax / na, u1y = ay / na, u1z = az / na;

  const double dot = u1x * bx + u1y * by + u1z * bz;
  const double wx = bx - dot * u1x;
  const double wy = by - dot * u1y;
  const double wz = bz - dot * u1z;
  const double nw = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (nw < kDegenerateEps) {
    out.fallback = true;
    return out;
  }
  const double u2x = wx / nw, u2y = wy / nw, u2z = wz / nw;

  const double u3x = u1y * u2z - u1z * u2y;
  const double u3y = u1z * u2x - u1x * u2z;
  const double u3z = u1x * u2y - u1y * u2x;

  out.r = {u1x, u2x, u3x, u1y, u2y, u3y, u1z, u2z, u3z};
  return out;
}

nn::Value project_to_rotation_value(const nn::Value& six) {
  using nn::Value;
  const nn::Tensor& t = six.tensor();
  if (t.rank() != 2 || t.dim(0) != 1 || t.dim(1) != 6) {
    throw ConfigError("rotation projection expects a [1,6] tensor");
  }
  Value a = nn::cols(six, 0, 3);
  Value b = nn::cols(six, 3, 3);

  Value na = nn::sqrtv(nn::add_scalar(nn::sum_all(nn::mul(a, a)), kNormGuard));
  Value u1 = nn::div_rowscalar(a, na);

  Value dot = nn::sum_all(nn::mul(u1, b));
  Value w = nn::sub(b, nn::mul_rowscalar(u1, dot));
  Value nw = nn::sqrtv(nn::add_scalar(nn::sum_all(nn::mul(w, w)), kNormGuard));
  Value u2 = nn::div_rowscalar(w, nw);

  Value u3 = nn::cross3(u1, u2);

  std::vector<Value> cells;
  cells.reserve(9);
  for (int row = 0; row < 3; ++row) {
    cells.push_back(nn::cols(u1, row, 1));
    cells.push_back(nn::cols(u2, row, 1));
    cells.push_back(nn::cols(u3, row, 1));
  }
  return nn::hcat(cells);
}

}  // namespace echoslam::odom
