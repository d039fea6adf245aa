#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "echoslam/nn/graph.hpp"

namespace echoslam::nn {

class Rng;

// Named, ordered collection of trainable leaves. Iteration order is
// insertion order everywhere (optimizer state, checkpoints), which keeps
// training and serialization deterministic.
class ParameterSet {
 public:
  Value add(const std::string& name, Tensor init);
  const Value& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t count() const { return params_.size(); }
  const std::string& name_at(std::size_t i) const { return names_[i]; }
  Value& at(std::size_t i) { return params_[i]; }
  const Value& at(std::size_t i) const { return params_[i]; }

  std::size_t total_elements() const;
  void zero_grad();

 private:
  std::vector<std::string> names_;
  std::vector<Value> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// y = x * W + b with W named "<prefix>.w" [in,out] and b "<prefix>.b" [1,out].
Value linear(const Value& x, const ParameterSet& params,
             const std::string& prefix);

// Registers W/b for `linear` with the default fan-in init and zero bias.
void add_linear(ParameterSet& params, const std::string& prefix, int in,
                int out, Rng& rng);

// Registers gamma=1 ("<prefix>.g") and beta=0 ("<prefix>.b") for layer norm.
void add_layer_norm(ParameterSet& params, const std::string& prefix, int dim);

Value layer_norm(const Value& x, const ParameterSet& params,
                 const std::string& prefix, double eps = 1e-5);

// Multi-head self-attention over a [tokens, d_model] input. Uses the
// parameters registered by add_mhsa under `prefix`; no causal mask, so the
// op is equivariant to permuting input rows. d_model must divide by heads.
Value mhsa_forward(const Value& x, const ParameterSet& params,
                   const std::string& prefix, int heads);

void add_mhsa(ParameterSet& params, const std::string& prefix, int d_model,
              Rng& rng);

// Two-layer MLP with GELU: d_model -> hidden -> d_model.
Value mlp_forward(const Value& x, const ParameterSet& params,
                  const std::string& prefix);

void add_mlp(ParameterSet& params, const std::string& prefix, int d_model,
             int hidden, Rng& rng);

// Pre-norm residual encoder block: x + MHSA(LN(x)) then x + MLP(LN(x)).
Value encoder_block(const Value& x, const ParameterSet& params,
                    const std::string& prefix, int heads);

void add_encoder_block(ParameterSet& params, const std::string& prefix,
                       int d_model, int hidden, Rng& rng);

}  // namespace echoslam::nn
