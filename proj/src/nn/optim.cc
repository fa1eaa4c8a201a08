// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/nn/optim.h"

#include <cmath>

#include "tasres/error.h"

namespace tasres::nn {

void Adam::Step(ParameterStore& store, double lr) {
  const std::vector<Param*> params = store.All();
  if (m_.empty()) {
    for (const Param* p : params) {
      m_.push_back(Matrix::Zero(p->values.rows(), p->values.cols()));
      v_.push_back(Matrix::Zero(p->values.rows(), p->values.cols()));
    }
  }
  Require(m_.size() == params.size(), "adam: parameter set changed between steps");
  ++step_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (p.grad.size() == 0) continue;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.grad;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.grad.cwiseAbs2();
    p.values.array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.eps);
  }
}

double ClipGlobalNorm(ParameterStore& store, double max_norm) {
  const double norm = store.GradNorm();
  if (norm > max_norm && std::isfinite(norm)) {
    const double scale = max_norm / norm;
    for (Param* p : store.All())
      if (p->grad.size() > 0) p->grad *= scale;
  }
  return norm;
}

}  // namespace tasres::nn
