// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_METRICS_LOSS_H_
#define TASRES_METRICS_LOSS_H_

#include <cmath>
#include <vector>

#include "tasres/model/tasnet.h"
#include "tasres/nn/graph.h"

namespace tasres::metrics {

struct LossConfig {
  double w = std::sqrt(0.5);
  bool zero_mean = true;
};

struct LossBreakdown {
  double loss_last = 0.0;
  std::vector<double> loss_i;  // i = 1..R-1
  double total = 0.0;
  double w = 0.0;
};

// Weight of intermediate i = 1..R-1 is w^(R-i).
std::vector<double> IntermediateWeights(int repeats, double w);

// (loss_last + sum_i w^(R-i) loss_i) / (1 + sum_i w^(R-i)), with
// R = loss_i.size() + 1.
double CombineLosses(double loss_last, const std::vector<double>& loss_i, double w);

// Negated SISNR of the final output and of every intermediate against s,
// combined as above. `intermediates_expected` is R-1 for variants with MI
// blocks and 0 otherwise; any other count is an error.
nn::Var TotalLoss(nn::Graph& g, const model::ForwardOutput& out, const nn::Matrix& s,
                  std::size_t intermediates_expected, const LossConfig& cfg,
                  LossBreakdown* breakdown = nullptr);

}  // namespace tasres::metrics

#endif  // TASRES_METRICS_LOSS_H_
