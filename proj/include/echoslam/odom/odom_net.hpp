#pragma once

#include <string>
#include <vector>

#include "echoslam/data/types.hpp"
#include "echoslam/nn/layers.hpp"
#include "echoslam/scan/window.hpp"

namespace echoslam::nn {
class Rng;
}

namespace echoslam::odom {

// CNN odometry head: the previous and current dense scans enter a circular
// convolution stack as two channels, the ultrasonic window enters a small
// dense branch, and fused features regress a displacement and a free 6-dof
// rotation representation (projected to SO(3) outside the graph).
struct OdomNetConfig {
  int window = 3;
  int input_dim = 12;
  int scan_size = 720;
  double scan_norm = 8.0;
  std::vector<int> conv_channels = {16, 32, 64};
  int kernel = 7;
  int stride = 2;
  int window_hidden = 64;
  int fusion_hidden = 128;

  void validate() const;
};

struct OdomOutput {
  nn::Value disp;  // [1,3]
  nn::Value rot6;  // [1,6]
};

class OdomNet {
 public:
  OdomNet(const OdomNetConfig& cfg, nn::Rng& rng);

  // window is [window, input_dim] normalized, scans is [2, scan_size] raw
  // ranges (normalization by scan_norm happens inside).
  OdomOutput forward(const nn::Tensor& window, const nn::Tensor& scans) const;

  // Projected relative transform; sets *fallback when the rotation head
  // output was degenerate.
  data::Transform3 predict(const scan::Window& window,
                           const std::vector<double>& prev_scan,
                           const std::vector<double>& cur_scan,
                           bool* fallback = nullptr) const;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const OdomNetConfig& config() const { return cfg_; }

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  OdomNetConfig cfg_;
  nn::ParameterSet params_;
};

// Stacks two scans as the [2, scan_size] conv input.
nn::Tensor scans_tensor(const std::vector<double>& prev_scan,
                        const std::vector<double>& cur_scan);

// Mean squared displacement error over 3 components plus mean squared
// rotation error over the 9 row-major entries.
struct OdomLossParts {
  double translation = 0.0;
  double rotation = 0.0;
  double total = 0.0;
};

OdomLossParts odom_loss(const data::Transform3& pred,
                        const data::Transform3& label);

// Graph loss from the raw heads; rot6 is projected inside the graph.
nn::Value odom_loss_value(const OdomOutput& out, const data::Transform3& label,
                          nn::Value* translation_term = nullptr,
                          nn::Value* rotation_term = nullptr);

}  // namespace echoslam::odom
