#include "echoslam/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "echoslam/errors.hpp"

namespace echoslam::nn {

namespace {

NodePtr make_node(Tensor value, std::vector<NodePtr> parents) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  for (const auto& p : n->parents) {
    if (p->requires_grad) n->requires_grad = true;
  }
  return n;
}

void require_rank2(const Value& v, const char* op) {
  if (v.tensor().rank() != 2) {
    throw ConfigError(std::string(op) + ": expected a rank-2 tensor, got " +
                      shape_str(v.tensor().shape()));
  }
}

void require_same_shape(const Value& a, const Value& b, const char* op) {
  if (!a.tensor().same_shape(b.tensor())) {
    throw ConfigError(std::string(op) + ": shape mismatch " +
                      shape_str(a.tensor().shape()) + " vs " +
                      shape_str(b.tensor().shape()));
  }
}

}  // namespace

Tensor& Node::ensure_grad() {
  if (!has_grad()) grad = Tensor::zeros(value.shape());
  return grad;
}

Value Value::constant(Tensor t) { return Value(make_node(std::move(t), {})); }

Value Value::leaf(Tensor t, std::string name) {
  auto n = make_node(std::move(t), {});
  n->requires_grad = true;
  n->name = std::move(name);
  return Value(n);
}

const Tensor& Value::tensor() const {
  if (!node_) throw ConfigError("use of an undefined Value");
  return node_->value;
}

Tensor& Value::tensor() {
  if (!node_) throw ConfigError("use of an undefined Value");
  return node_->value;
}

double Value::scalar() const {
  const Tensor& t = tensor();
  if (t.size() != 1) {
    throw ConfigError("scalar() on tensor of shape " + shape_str(t.shape()));
  }
  return t[0];
}

const Tensor& Value::grad() const {
  if (!node_) throw ConfigError("use of an undefined Value");
  if (!node_->has_grad()) {
    throw ConfigError("gradient requested before any backward pass");
  }
  return node_->grad;
}

void Value::zero_grad() {
  if (node_ && node_->has_grad()) node_->grad.fill(0.0);
}

void Value::backward() const {
  if (!node_) throw ConfigError("backward() on an undefined Value");
  if (node_->value.size() != 1) {
    throw ConfigError("backward() requires a single-element root, got " +
                      shape_str(node_->value.shape()));
  }

  // Iterative post-order DFS; parents appear before children in `order`.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->ensure_grad()[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop && n->requires_grad && n->has_grad()) n->backprop(*n);
  }
}

// ---------------------------------------------------------------- basics

Value add(const Value& a, const Value& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.tensor()[i];
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [](Node& self) {
    for (int k = 0; k < 2; ++k) {
      Node& p = *self.parents[k];
      if (!p.requires_grad) continue;
      Tensor& g = p.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  };
  return Value(n);
}

Value sub(const Value& a, const Value& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.tensor()[i];
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb.requires_grad) {
      Tensor& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  };
  return Value(n);
}

Value mul(const Value& a, const Value& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.tensor()[i];
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += self.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      Tensor& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += self.grad[i] * pa.value[i];
    }
  };
  return Value(n);
}

Value divv(const Value& a, const Value& b) {
  require_same_shape(a, b, "div");
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= b.tensor()[i];
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += self.grad[i] / pb.value[i];
    }
    if (pb.requires_grad) {
      Tensor& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] -= self.grad[i] * pa.value[i] / (pb.value[i] * pb.value[i]);
    }
  };
  return Value(n);
}

Value scale(const Value& a, double c) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [c](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * self.grad[i];
  };
  return Value(n);
}

Value add_scalar(const Value& a, double c) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  };
  return Value(n);
}

Value add_const(const Value& a, const Tensor& c) {
  if (!a.tensor().same_shape(c)) {
    throw ConfigError("add_const: shape mismatch");
  }
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  };
  return Value(n);
}

Value mul_const(const Value& a, const Tensor& c) {
  if (!a.tensor().same_shape(c)) {
    throw ConfigError("mul_const: shape mismatch");
  }
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c[i];
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [c](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c[i] * self.grad[i];
  };
  return Value(n);
}

Value add_rowvec(const Value& a, const Value& row) {
  require_rank2(a, "add_rowvec");
  require_rank2(row, "add_rowvec");
  const int m = a.tensor().dim(0), ncol = a.tensor().dim(1);
  if (row.tensor().dim(0) != 1 || row.tensor().dim(1) != ncol) {
    throw ConfigError("add_rowvec: row must be [1," + std::to_string(ncol) +
                      "], got " + shape_str(row.tensor().shape()));
  }
  Tensor out = a.tensor();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < ncol; ++j) out.at(i, j) += row.tensor()[j];
  auto n = make_node(std::move(out), {a.node(), row.node()});
  n->backprop = [m, ncol](Node& self) {
    Node& pa = *self.parents[0];
    Node& pr = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pr.requires_grad) {
      Tensor& g = pr.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < ncol; ++j) g[j] += self.grad.at(i, j);
    }
  };
  return Value(n);
}

Value mul_rowscalar(const Value& a, const Value& s) {
  if (s.tensor().size() != 1) {
    throw ConfigError("mul_rowscalar: scalar operand must have one element");
  }
  const double sv = s.tensor()[0];
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sv;
  auto n = make_node(std::move(out), {a.node(), s.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& ps = *self.parents[1];
    const double sv = ps.value[0];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sv * self.grad[i];
    }
    if (ps.requires_grad) {
      Tensor& g = ps.ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < pa.value.size(); ++i)
        acc += self.grad[i] * pa.value[i];
      g[0] += acc;
    }
  };
  return Value(n);
}

Value div_rowscalar(const Value& a, const Value& s) {
  if (s.tensor().size() != 1) {
    throw ConfigError("div_rowscalar: scalar operand must have one element");
  }
  const double sv = s.tensor()[0];
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sv;
  auto n = make_node(std::move(out), {a.node(), s.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& ps = *self.parents[1];
    const double sv = ps.value[0];
    if (pa.requires_grad) {
      Tensor& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / sv;
    }
    if (ps.requires_grad) {
      Tensor& g = ps.ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < pa.value.size(); ++i)
        acc += self.grad[i] * pa.value[i];
      g[0] -= acc / (sv * sv);
    }
  };
  return Value(n);
}

// ----------------------------------------------------------- nonlinearities

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

Value gelu(const Value& a) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = out[i];
    out[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  }
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = p.value[i];
      const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      g[i] += self.grad[i] * (cdf + x * pdf);
    }
  };
  return Value(n);
}

Value sigmoid(const Value& a) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  }
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = self.value[i];
      g[i] += self.grad[i] * s * (1.0 - s);
    }
  };
  return Value(n);
}

Value sqrtv(const Value& a) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) throw ConfigError("sqrtv: negative input");
    out[i] = std::sqrt(out[i]);
  }
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = self.value[i];
      if (s > 0.0) g[i] += self.grad[i] * 0.5 / s;
    }
  };
  return Value(n);
}

Value absv(const Value& a) {
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(out[i]);
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = p.value[i];
      const double s = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      g[i] += self.grad[i] * s;
    }
  };
  return Value(n);
}

// ------------------------------------------------------------- structural

Value matmul(const Value& a, const Value& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const int m = a.tensor().dim(0), k = a.tensor().dim(1);
  const int n2 = b.tensor().dim(1);
  if (b.tensor().dim(0) != k) {
    throw ConfigError("matmul: inner dimensions differ, " +
                      shape_str(a.tensor().shape()) + " x " +
                      shape_str(b.tensor().shape()));
  }
  Tensor out = Tensor::zeros({m, n2});
  const Tensor& ta = a.tensor();
  const Tensor& tb = b.tensor();
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = ta.at(i, p);
      if (av == 0.0) continue;
      for (int j = 0; j < n2; ++j) out.at(i, j) += av * tb.at(p, j);
    }
  }
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [m, k, n2](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& ga = pa.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n2; ++j) {
          const double gv = self.grad.at(i, j);
          if (gv == 0.0) continue;
          for (int p = 0; p < k; ++p) ga.at(i, p) += gv * pb.value.at(p, j);
        }
    }
    if (pb.requires_grad) {
      Tensor& gb = pb.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          const double av = pa.value.at(i, p);
          if (av == 0.0) continue;
          for (int j = 0; j < n2; ++j) gb.at(p, j) += av * self.grad.at(i, j);
        }
    }
  };
  return Value(n);
}

Value matmul_nt(const Value& a, const Value& b) {
  require_rank2(a, "matmul_nt");
  require_rank2(b, "matmul_nt");
  const int m = a.tensor().dim(0), k = a.tensor().dim(1);
  const int n2 = b.tensor().dim(0);
  if (b.tensor().dim(1) != k) {
    throw ConfigError("matmul_nt: inner dimensions differ, " +
                      shape_str(a.tensor().shape()) + " x " +
                      shape_str(b.tensor().shape()) + "^T");
  }
  Tensor out = Tensor::zeros({m, n2});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n2; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p)
        acc += a.tensor().at(i, p) * b.tensor().at(j, p);
      out.at(i, j) = acc;
    }
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [m, k, n2](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      Tensor& ga = pa.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n2; ++j) {
          const double gv = self.grad.at(i, j);
          if (gv == 0.0) continue;
          for (int p = 0; p < k; ++p) ga.at(i, p) += gv * pb.value.at(j, p);
        }
    }
    if (pb.requires_grad) {
      Tensor& gb = pb.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n2; ++j) {
          const double gv = self.grad.at(i, j);
          if (gv == 0.0) continue;
          for (int p = 0; p < k; ++p) gb.at(j, p) += gv * pa.value.at(i, p);
        }
    }
  };
  return Value(n);
}

Value cols(const Value& a, int begin, int count) {
  require_rank2(a, "cols");
  const int m = a.tensor().dim(0), ncol = a.tensor().dim(1);
  if (begin < 0 || count <= 0 || begin + count > ncol) {
    throw ConfigError("cols: slice [" + std::to_string(begin) + "," +
                      std::to_string(begin + count) + ") out of range for " +
                      shape_str(a.tensor().shape()));
  }
  Tensor out = Tensor::zeros({m, count});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < count; ++j) out.at(i, j) = a.tensor().at(i, begin + j);
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [m, count, begin](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < count; ++j) g.at(i, begin + j) += self.grad.at(i, j);
  };
  return Value(n);
}

Value hcat(const std::vector<Value>& parts) {
  if (parts.empty()) throw ConfigError("hcat: no operands");
  const int m = parts[0].tensor().dim(0);
  int total = 0;
  std::vector<NodePtr> parents;
  for (const auto& p : parts) {
    require_rank2(p, "hcat");
    if (p.tensor().dim(0) != m) throw ConfigError("hcat: row count mismatch");
    total += p.tensor().dim(1);
    parents.push_back(p.node());
  }
  Tensor out = Tensor::zeros({m, total});
  int off = 0;
  for (const auto& p : parts) {
    const int w = p.tensor().dim(1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j) out.at(i, off + j) = p.tensor().at(i, j);
    off += w;
  }
  auto n = make_node(std::move(out), std::move(parents));
  n->backprop = [m](Node& self) {
    int off = 0;
    for (auto& pp : self.parents) {
      Node& p = *pp;
      const int w = p.value.dim(1);
      if (p.requires_grad) {
        Tensor& g = p.ensure_grad();
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < w; ++j) g.at(i, j) += self.grad.at(i, off + j);
      }
      off += w;
    }
  };
  return Value(n);
}

Value flatten_row(const Value& a) {
  const std::size_t numel = a.tensor().size();
  Tensor out = Tensor::zeros({1, static_cast<int>(numel)});
  for (std::size_t i = 0; i < numel; ++i) out[i] = a.tensor()[i];
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  };
  return Value(n);
}

Value roll_cols(const Value& a, int shift) {
  require_rank2(a, "roll_cols");
  const int m = a.tensor().dim(0), ncol = a.tensor().dim(1);
  const int s = ((shift % ncol) + ncol) % ncol;
  Tensor out = Tensor::zeros({m, ncol});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < ncol; ++j)
      out.at(i, j) = a.tensor().at(i, (j - s + ncol) % ncol);
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [m, ncol, s](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < ncol; ++j)
        g.at(i, (j - s + ncol) % ncol) += self.grad.at(i, j);
  };
  return Value(n);
}

Value softmax_rows(const Value& a) {
  require_rank2(a, "softmax_rows");
  const int m = a.tensor().dim(0), ncol = a.tensor().dim(1);
  Tensor out = a.tensor();
  for (int i = 0; i < m; ++i) {
    double mx = out.at(i, 0);
    for (int j = 1; j < ncol; ++j) mx = std::max(mx, out.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < ncol; ++j) {
      out.at(i, j) = std::exp(out.at(i, j) - mx);
      sum += out.at(i, j);
    }
    for (int j = 0; j < ncol; ++j) out.at(i, j) /= sum;
  }
  auto n = make_node(std::move(out), {a.node()});
  n->backprop = [m, ncol](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < ncol; ++j)
        dot += self.grad.at(i, j) * self.value.at(i, j);
      for (int j = 0; j < ncol; ++j)
        g.at(i, j) += self.value.at(i, j) * (self.grad.at(i, j) - dot);
    }
  };
  return Value(n);
}

Value sum_all(const Value& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.tensor().size(); ++i) acc += a.tensor()[i];
  auto n = make_node(Tensor::from({1, 1}, {acc}), {a.node()});
  n->backprop = [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
  };
  return Value(n);
}

Value mean_all(const Value& a) {
  return scale(sum_all(a), 1.0 / static_cast<double>(a.tensor().size()));
}

Value cross3(const Value& a, const Value& b) {
  if (a.tensor().size() != 3 || b.tensor().size() != 3) {
    throw ConfigError("cross3: operands must have three elements");
  }
  const Tensor& ta = a.tensor();
  const Tensor& tb = b.tensor();
  Tensor out = Tensor::from({1, 3}, {ta[1] * tb[2] - ta[2] * tb[1],
                                     ta[2] * tb[0] - ta[0] * tb[2],
                                     ta[0] * tb[1] - ta[1] * tb[0]});
  auto n = make_node(std::move(out), {a.node(), b.node()});
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const Tensor& g = self.grad;
    if (pa.requires_grad) {
      Tensor& ga = pa.ensure_grad();
      const Tensor& bv = pb.value;
      ga[0] += bv[1] * g[2] - bv[2] * g[1];
      ga[1] += bv[2] * g[0] - bv[0] * g[2];
      ga[2] += bv[0] * g[1] - bv[1] * g[0];
    }
    if (pb.requires_grad) {
      Tensor& gb = pb.ensure_grad();
      const Tensor& av = pa.value;
      gb[0] += g[1] * av[2] - g[2] * av[1];
      gb[1] += g[2] * av[0] - g[0] * av[2];
      gb[2] += g[0] * av[1] - g[1] * av[0];
    }
  };
  return Value(n);
}

Value layer_norm_rows(const Value& x, const Value& gamma, const Value& beta,
                      double eps) {
  require_rank2(x, "layer_norm_rows");
  const int m = x.tensor().dim(0), ncol = x.tensor().dim(1);
  auto check_affine = [&](const Value& v, const char* what) {
    if (v.tensor().rank() != 2 || v.tensor().dim(0) != 1 ||
        v.tensor().dim(1) != ncol) {
      throw ConfigError(std::string("layer_norm_rows: ") + what +
                        " must be [1," + std::to_string(ncol) + "]");
    }
  };
  check_affine(gamma, "gamma");
  check_affine(beta, "beta");

  Tensor xhat = Tensor::zeros({m, ncol});
  Tensor inv_std = Tensor::zeros({m});
  Tensor out = Tensor::zeros({m, ncol});
  for (int i = 0; i < m; ++i) {
    double mean = 0.0;
    for (int j = 0; j < ncol; ++j) mean += x.tensor().at(i, j);
    mean /= ncol;
    double var = 0.0;
    for (int j = 0; j < ncol; ++j) {
      const double d = x.tensor().at(i, j) - mean;
      var += d * d;
    }
    var /= ncol;
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[i] = is;
    for (int j = 0; j < ncol; ++j) {
      const double h = (x.tensor().at(i, j) - mean) * is;
      xhat.at(i, j) = h;
      out.at(i, j) = gamma.tensor()[j] * h + beta.tensor()[j];
    }
  }
  auto n = make_node(std::move(out), {x.node(), gamma.node(), beta.node()});
  n->backprop = [m, ncol, xhat = std::move(xhat),
                 inv_std = std::move(inv_std)](Node& self) {
    Node& px = *self.parents[0];
    Node& pg = *self.parents[1];
    Node& pb = *self.parents[2];
    if (pg.requires_grad) {
      Tensor& g = pg.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < ncol; ++j)
          g[j] += self.grad.at(i, j) * xhat.at(i, j);
    }
    if (pb.requires_grad) {
      Tensor& g = pb.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < ncol; ++j) g[j] += self.grad.at(i, j);
    }
    if (px.requires_grad) {
      Tensor& g = px.ensure_grad();
      for (int i = 0; i < m; ++i) {
        double mean_dh = 0.0, mean_dh_h = 0.0;
        for (int j = 0; j < ncol; ++j) {
          const double dh = self.grad.at(i, j) * pg.value[j];
          mean_dh += dh;
          mean_dh_h += dh * xhat.at(i, j);
        }
        mean_dh /= ncol;
        mean_dh_h /= ncol;
        for (int j = 0; j < ncol; ++j) {
          const double dh = self.grad.at(i, j) * pg.value[j];
          g.at(i, j) +=
              inv_std[i] * (dh - mean_dh - xhat.at(i, j) * mean_dh_h);
        }
      }
    }
  };
  return Value(n);
}

Value conv1d_circular(const Value& x, const Value& w, const Value& b,
                      int stride) {
  require_rank2(x, "conv1d_circular");
  if (w.tensor().rank() != 3) {
    throw ConfigError("conv1d_circular: weights must be rank-3 {out,in,k}");
  }
  const int c_in = x.tensor().dim(0), len = x.tensor().dim(1);
  const int c_out = w.tensor().dim(0), k = w.tensor().dim(2);
  if (w.tensor().dim(1) != c_in) {
    throw ConfigError("conv1d_circular: weight in-channels " +
                      std::to_string(w.tensor().dim(1)) + " vs input " +
                      std::to_string(c_in));
  }
  if (k % 2 == 0) throw ConfigError("conv1d_circular: kernel must be odd");
  if (stride <= 0 || len % stride != 0) {
    throw ConfigError("conv1d_circular: length " + std::to_string(len) +
                      " not divisible by stride " + std::to_string(stride));
  }
  if (b.tensor().rank() != 2 || b.tensor().dim(0) != 1 ||
      b.tensor().dim(1) != c_out) {
    throw ConfigError("conv1d_circular: bias must be [1,c_out]");
  }
  const int out_len = len / stride;
  const int pad = (k - 1) / 2;

  // Circular source index per (output position, tap), shared by the forward
  // pass and the backprop; hoists the modulo out of the hot loops.
  std::vector<int> src(static_cast<std::size_t>(out_len) * k);
  for (int j = 0; j < out_len; ++j) {
    for (int t = 0; t < k; ++t) {
      src[static_cast<std::size_t>(j) * k + t] =
          ((j * stride + t - pad) % len + len) % len;
    }
  }

  Tensor out = Tensor::zeros({c_out, out_len});
  {
    const double* xd = x.tensor().data();
    const double* wd = w.tensor().data();
    const double* bd = b.tensor().data();
    double* od = out.data();
    for (int oc = 0; oc < c_out; ++oc) {
      for (int j = 0; j < out_len; ++j) {
        double acc = bd[oc];
        const int* sj = src.data() + static_cast<std::size_t>(j) * k;
        const double* wrow = wd + static_cast<std::size_t>(oc) * c_in * k;
        for (int ic = 0; ic < c_in; ++ic, wrow += k) {
          const double* xrow = xd + static_cast<std::size_t>(ic) * len;
          for (int t = 0; t < k; ++t) acc += wrow[t] * xrow[sj[t]];
        }
        od[static_cast<std::size_t>(oc) * out_len + j] = acc;
      }
    }
  }
  auto n = make_node(std::move(out), {x.node(), w.node(), b.node()});
  n->backprop = [c_in, len, c_out, k, out_len,
                 src = std::move(src)](Node& self) {
    Node& px = *self.parents[0];
    Node& pw = *self.parents[1];
    Node& pb = *self.parents[2];
    if (pb.requires_grad) {
      Tensor& g = pb.ensure_grad();
      for (int oc = 0; oc < c_out; ++oc)
        for (int j = 0; j < out_len; ++j) g[oc] += self.grad.at(oc, j);
    }
    const bool nx = px.requires_grad, nw = pw.requires_grad;
    if (!nx && !nw) return;
    const double* gd = self.grad.data();
    const double* xd = px.value.data();
    const double* wd = pw.value.data();
    double* gxd = nx ? px.ensure_grad().data() : nullptr;
    double* gwd = nw ? pw.ensure_grad().data() : nullptr;
    for (int oc = 0; oc < c_out; ++oc) {
      for (int j = 0; j < out_len; ++j) {
        const double gv = gd[static_cast<std::size_t>(oc) * out_len + j];
        if (gv == 0.0) continue;
        const int* sj = src.data() + static_cast<std::size_t>(j) * k;
        if (nw && nx) {
          double* gwrow = gwd + static_cast<std::size_t>(oc) * c_in * k;
          const double* wrow = wd + static_cast<std::size_t>(oc) * c_in * k;
          for (int ic = 0; ic < c_in; ++ic, gwrow += k, wrow += k) {
            const double* xrow = xd + static_cast<std::size_t>(ic) * len;
            double* gxrow = gxd + static_cast<std::size_t>(ic) * len;
            for (int t = 0; t < k; ++t) {
              gwrow[t] += gv * xrow[sj[t]];
              gxrow[sj[t]] += gv * wrow[t];
            }
          }
        } else if (nw) {
          double* gwrow = gwd + static_cast<std::size_t>(oc) * c_in * k;
          for (int ic = 0; ic < c_in; ++ic, gwrow += k) {
            const double* xrow = xd + static_cast<std::size_t>(ic) * len;
            for (int t = 0; t < k; ++t) gwrow[t] += gv * xrow[sj[t]];
          }
        } else {
          const double* wrow = wd + static_cast<std::size_t>(oc) * c_in * k;
          for (int ic = 0; ic < c_in; ++ic, wrow += k) {
            double* gxrow = gxd + static_cast<std::size_t>(ic) * len;
            for (int t = 0; t < k; ++t) gxrow[sj[t]] += gv * wrow[t];
          }
        }
      }
    }
  };
  return Value(n);
}

Value global_avg_pool(const Value& x) {
  require_rank2(x, "global_avg_pool");
  const int c = x.tensor().dim(0), len = x.tensor().dim(1);
  Tensor out = Tensor::zeros({1, c});
  for (int i = 0; i < c; ++i) {
    double acc = 0.0;
    for (int j = 0; j < len; ++j) acc += x.tensor().at(i, j);
    out[i] = acc / len;
  }
  auto n = make_node(std::move(out), {x.node()});
  n->backprop = [c, len](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Tensor& g = p.ensure_grad();
    for (int i = 0; i < c; ++i) {
      const double gv = self.grad[i] / len;
      for (int j = 0; j < len; ++j) g.at(i, j) += gv;
    }
  };
  return Value(n);
}

}  // namespace echoslam::nn
