#include "echoslam/nn/adam.hpp"

#include <cmath>

#include "echoslam/errors.hpp"

namespace echoslam::nn {

Adam::Adam(ParameterSet& params, AdamConfig cfg)
    : params_(&params), cfg_(cfg) {
  m_.reserve(params.count());
  v_.reserve(params.count());
  for (std::size_t i = 0; i < params.count(); ++i) {
    m_.push_back(Tensor::zeros(params.at(i).tensor().shape()));
    v_.push_back(Tensor::zeros(params.at(i).tensor().shape()));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_->count(); ++i) {
    Value& p = params_->at(i);
    if (!p.node()->has_grad()) {
      throw ConfigError("Adam::step: no gradient for parameter " +
                        params_->name_at(i));
    }
    Tensor& w = p.tensor();
    const Tensor& g = p.node()->grad;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace echoslam::nn
