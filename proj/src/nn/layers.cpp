#include "echoslam/nn/layers.hpp"

#include <cmath>

#include "echoslam/errors.hpp"
#include "echoslam/nn/rng.hpp"

namespace echoslam::nn {

Value ParameterSet::add(const std::string& name, Tensor init) {
  if (index_.count(name)) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  Value v = Value::leaf(std::move(init), name);
  index_[name] = params_.size();
  names_.push_back(name);
  params_.push_back(v);
  return v;
}

const Value& ParameterSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
  return params_[it->second];
}

bool ParameterSet::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

std::size_t ParameterSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor().size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

Value linear(const Value& x, const ParameterSet& params,
             const std::string& prefix) {
  return add_rowvec(matmul(x, params.get(prefix + ".w")),
                    params.get(prefix + ".b"));
}

void add_linear(ParameterSet& params, const std::string& prefix, int in,
                int out, Rng& rng) {
  params.add(prefix + ".w", Tensor::uniform_fan_in({in, out}, in, rng));
  params.add(prefix + ".b", Tensor::zeros({1, out}));
}

void add_layer_norm(ParameterSet& params, const std::string& prefix, int dim) {
  params.add(prefix + ".g", Tensor::full({1, dim}, 1.0));
  params.add(prefix + ".b", Tensor::zeros({1, dim}));
}

Value layer_norm(const Value& x, const ParameterSet& params,
                 const std::string& prefix, double eps) {
  return layer_norm_rows(x, params.get(prefix + ".g"),
                         params.get(prefix + ".b"), eps);
}

Value mhsa_forward(const Value& x, const ParameterSet& params,
                   const std::string& prefix, int heads) {
  const int d_model = x.tensor().dim(1);
  if (heads <= 0 || d_model % heads != 0) {
    throw ConfigError("mhsa_forward: heads must divide d_model");
  }
  const int d_head = d_model / heads;
  Value q = linear(x, params, prefix + ".q");
  Value k = linear(x, params, prefix + ".k");
  Value v = linear(x, params, prefix + ".v");
  std::vector<Value> head_outs;
  head_outs.reserve(heads);
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(d_head));
  for (int h = 0; h < heads; ++h) {
    Value qh = cols(q, h * d_head, d_head);
    Value kh = cols(k, h * d_head, d_head);
    Value vh = cols(v, h * d_head, d_head);
    Value attn = softmax_rows(scale(matmul_nt(qh, kh), inv_scale));
    head_outs.push_back(matmul(attn, vh));
  }
  return linear(hcat(head_outs), params, prefix + ".o");
}

void add_mhsa(ParameterSet& params, const std::string& prefix, int d_model,
              Rng& rng) {
  add_linear(params, prefix + ".q", d_model, d_model, rng);
  add_linear(params, prefix + ".k", d_model, d_model, rng);
  add_linear(params, prefix + ".v", d_model, d_model, rng);
  add_linear(params, prefix + ".o", d_model, d_model, rng);
}

Value mlp_forward(const Value& x, const ParameterSet& params,
                  const std::string& prefix) {
  return linear(gelu(linear(x, params, prefix + ".fc1")), params,
                prefix + ".fc2");
}

void add_mlp(ParameterSet& params, const std::string& prefix, int d_model,
             int hidden, Rng& rng) {
  add_linear(params, prefix + ".fc1", d_model, hidden, rng);
  add_linear(params, prefix + ".fc2", hidden, d_model, rng);
}

Value encoder_block(const Value& x, const ParameterSet& params,
                    const std::string& prefix, int heads) {
  Value a = add(x, mhsa_forward(layer_norm(x, params, prefix + ".ln1"), params,
                                prefix + ".attn", heads));
  return add(a, mlp_forward(layer_norm(a, params, prefix + ".ln2"), params,
                            prefix + ".mlp"));
}

void add_encoder_block(ParameterSet& params, const std::string& prefix,
                       int d_model, int hidden, Rng& rng) {
  add_layer_norm(params, prefix + ".ln1", d_model);
  add_mhsa(params, prefix + ".attn", d_model, rng);
  add_layer_norm(params, prefix + ".ln2", d_model);
  add_mlp(params, prefix + ".mlp", d_model, hidden, rng);
}

}  // namespace echoslam::nn
