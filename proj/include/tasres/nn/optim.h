// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_NN_OPTIM_H_
#define TASRES_NN_OPTIM_H_

#include <cstdint>
#include <vector>

#include "tasres/nn/param.h"

namespace tasres::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moments per parameter, in store order.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // One bias-corrected update of every parameter from its grad. The step
  // counter starts at 1 on the first call.
  void Step(ParameterStore& store, double lr);
  std::int64_t steps() const { return step_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// Rescales all gradients so their global l2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGlobalNorm(ParameterStore& store, double max_norm);

}  // namespace tasres::nn

#endif  // TASRES_NN_OPTIM_H_
