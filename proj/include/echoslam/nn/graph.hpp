#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "echoslam/nn/tensor.hpp"

namespace echoslam::nn {

struct Node;
using NodePtr = std::shared_ptr<Node>;

// One node of the computation graph. Ops evaluate eagerly: the output
// tensor is computed when the node is built, and a closure that routes
// gradients to the parents is stored for the backward pass.
struct Node {
  Tensor value;
  Tensor grad;  // allocated on first use, same shape as value
  bool requires_grad = false;
  std::string name;  // set for named leaves (parameters)
  std::vector<NodePtr> parents;
  std::function<void(Node&)> backprop;

  Tensor& ensure_grad();
  bool has_grad() const { return grad.size() == value.size(); }
};

// Shared handle to a graph node.
class Value {
 public:
  Value() = default;
  explicit Value(NodePtr node) : node_(std::move(node)) {}

  // Leaf that does not receive gradients.
  static Value constant(Tensor t);
  // Leaf that accumulates gradients (parameters, grad-checked inputs).
  static Value leaf(Tensor t, std::string name);

  bool defined() const { return node_ != nullptr; }
  const NodePtr& node() const { return node_; }

  const Tensor& tensor() const;
  Tensor& tensor();
  const std::vector<int>& shape() const { return tensor().shape(); }

  // Value of a single-element tensor.
  double scalar() const;

  const Tensor& grad() const;
  void zero_grad();

  // Reverse-mode sweep from this node, which must be single-element.
  // Gradients accumulate into every leaf with requires_grad.
  void backward() const;

 private:
  NodePtr node_;
};

// ---- elementwise and broadcast ops ----
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value divv(const Value& a, const Value& b);
Value scale(const Value& a, double c);
Value add_scalar(const Value& a, double c);
Value add_const(const Value& a, const Tensor& c);  // same shape
Value mul_const(const Value& a, const Tensor& c);  // same shape
Value add_rowvec(const Value& a, const Value& row);    // [m,n] + [1,n]
Value mul_rowscalar(const Value& a, const Value& s);   // a * s, s is [1,1]
Value div_rowscalar(const Value& a, const Value& s);   // a / s, s is [1,1]
Value gelu(const Value& a);     // exact erf form
Value sigmoid(const Value& a);
Value sqrtv(const Value& a);    // inputs must be >= 0
Value absv(const Value& a);     // derivative at 0 defined as 0

// ---- structural ops (2-D operands) ----
Value matmul(const Value& a, const Value& b);     // [m,k]x[k,n]
Value matmul_nt(const Value& a, const Value& b);  // [m,k]x[n,k]^T -> [m,n]
Value cols(const Value& a, int begin, int count);
Value hcat(const std::vector<Value>& parts);      // common row count
Value flatten_row(const Value& a);                // -> [1, numel]
Value roll_cols(const Value& a, int shift);       // out[:,j] = a[:,(j-shift) mod n]
Value softmax_rows(const Value& a);
Value sum_all(const Value& a);   // -> [1,1]
Value mean_all(const Value& a);  // -> [1,1]
Value cross3(const Value& a, const Value& b);  // [1,3] x [1,3] -> [1,3]

// Row-wise layer norm; gamma and beta are [1,n].
Value layer_norm_rows(const Value& x, const Value& gamma, const Value& beta,
                      double eps = 1e-5);

// Circular 1-D convolution. x is [c_in, len], w is {c_out, c_in, k} with k
// odd, b is [1, c_out]; len must be divisible by stride. Output is
// [c_out, len/stride] with SAME-style wraparound padding.
Value conv1d_circular(const Value& x, const Value& w, const Value& b,
                      int stride);

Value global_avg_pool(const Value& x);  // [c, len] -> [1, c]

}  // namespace echoslam::nn
