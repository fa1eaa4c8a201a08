// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/nn/graph.h"

#include <cmath>

#include "tasres/error.h"

namespace tasres::nn {

Var Graph::Constant(Matrix value) { return Record(std::move(value), false, nullptr); }

Var Graph::Parameter(const Param& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  const Var v = Record(p.Effective(), true, nullptr);
  param_nodes_[&p] = v.id;
  return v;
}

Var Graph::Record(Matrix value, bool requires_grad, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Graph::grad(int id) {
  Node& node = nodes_[id];
  if (node.grad.size() == 0 && node.value.size() > 0)
    node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

void Graph::Backward(Var scalar) {
  Require(scalar.valid() && scalar.id < static_cast<int>(nodes_.size()),
          "backward: no recorded forward pass");
  Require(nodes_[scalar.id].value.size() == 1, "backward: output must be a scalar");
  Require(!backward_done_, "backward: already run on this graph");
  grad(scalar) = Matrix::Constant(1, 1, 1.0);
  for (int id = scalar.id; id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.size() == 0 || !node.backward) continue;
    node.backward(*this, id);
    // Intermediate gradients are no longer needed once pushed to inputs.
    node.grad.resize(0, 0);
  }
  backward_done_ = true;
}

Matrix Graph::ParamGrad(const Param& p) const {
  auto it = param_nodes_.find(&p);
  if (it == param_nodes_.end() || nodes_[it->second].grad.size() == 0)
    return Matrix::Zero(p.values.rows(), p.values.cols());
  const Matrix& g = nodes_[it->second].grad;
  if (p.constraint == Constraint::kNone) return g;
  // d softplus(u) / du = sigmoid(u).
  Matrix out = g;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) *= 1.0 / (1.0 + std::exp(-p.values(i)));
  return out;
}

void Graph::AccumulateInto(ParameterStore& store, double scale) const {
  for (Param* p : store.All()) {
    if (!Uses(*p)) continue;
    p->grad += scale * ParamGrad(*p);
  }
}

}  // namespace tasres::nn
