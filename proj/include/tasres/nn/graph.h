// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_NN_GRAPH_H_
#define TASRES_NN_GRAPH_H_

#include <functional>
#include <unordered_map>
#include <vector>

#include "tasres/nn/param.h"

namespace tasres::nn {

class Graph;

// Handle to a node of a Graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Tape for reverse-mode differentiation. Every op appends a node holding its
// forward value and, when any input needs a gradient, a closure that pushes
// the node's gradient to its inputs. Backward() walks the tape in reverse.
//
// A graph is single-owner. Parameter gradients stay inside the graph until
// AccumulateInto() adds them to Param::grad, so several graphs over
// the same ParameterStore may run on different threads.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  Var Constant(Matrix value);
  // The effective (constrained) value of p. Repeated calls return the same
  // node.
  Var Parameter(const Param& p);

  // Appends a node. `backward` may be empty when no input requires grad.
  Var Record(Matrix value, bool requires_grad, BackwardFn backward);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  // Gradient buffer of a node, zero-initialized on first access.
  Matrix& grad(int id);
  Matrix& grad(Var v) { return grad(v.id); }
  bool has_grad(Var v) const { return nodes_[v.id].grad.size() > 0; }

  // Seeds d(out)/d(out) = 1 for a 1x1 node and runs all backward closures.
  void Backward(Var scalar);
  bool backward_done() const { return backward_done_; }

  // Gradient w.r.t. the stored (unconstrained) values of p.
  Matrix ParamGrad(const Param& p) const;
  bool Uses(const Param& p) const { return param_nodes_.contains(&p); }
  // Adds scale * ParamGrad(p) to p.grad for every parameter of the store
  // that this graph used.
  void AccumulateInto(ParameterStore& store, double scale = 1.0) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Param*, int> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace tasres::nn

#endif  // TASRES_NN_GRAPH_H_
