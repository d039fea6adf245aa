#include "echoslam/slam/metrics.hpp"

#include <cmath>

#include "echoslam/data/preintegrate.hpp"
#include "echoslam/errors.hpp"

namespace echoslam::slam {

OdometryScore odometry_score(const std::vector<sim::Pose2>& estimated,
                             const std::vector<sim::Pose2>& ground_truth,
                             double translation_tol, double angle_tol_deg) {
  if (estimated.size() != ground_truth.size()) {
    throw ConfigError("trajectories must have equal length");
  }
  if (estimated.size() < 2) {
    throw ConfigError("scoring needs at least two poses");
  }
  if (!(translation_tol > 0.0) || !(angle_tol_deg > 0.0)) {
    throw ConfigError("score tolerances must be positive");
  }
  const double angle_tol = angle_tol_deg * 3.14159265358979323846 / 180.0;

  OdometryScore score;
  score.frames = static_cast<int>(estimated.size()) - 1;

  int passes = 0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double dx = estimated[i].x - ground_truth[i].x;
    const double dy = estimated[i].y - ground_truth[i].y;
    sq_sum += dx * dx + dy * dy;
    if (i == 0) continue;

    const data::Transform3 rel_est =
        data::relative_transform(estimated[i - 1], estimated[i]);
    const data::Transform3 rel_gt =
        data::relative_transform(ground_truth[i - 1], ground_truth[i]);
    const double et = std::hypot(rel_est.t[0] - rel_gt.t[0],
                                 rel_est.t[1] - rel_gt.t[1]);
    const double ea =
        std::fabs(sim::wrap_angle(rel_est.yaw() - rel_gt.yaw()));
    if (et <= translation_tol && ea <= angle_tol) ++passes;

    score.path_length += std::hypot(ground_truth[i].x - ground_truth[i - 1].x,
                                    ground_truth[i].y - ground_truth[i - 1].y);
  }
  score.pass_rate = 100.0 * passes / score.frames;
  score.ate_rmse = std::sqrt(sq_sum / static_cast<double>(estimated.size()));

  const double final_err =
      std::hypot(estimated.back().x - ground_truth.back().x,
                 estimated.back().y - ground_truth.back().y);
  score.drift_percent =
      100.0 * final_err / std::max(score.path_length, 1e-9);
  return score;
}

}  // namespace echoslam::slam
