// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/metrics/loss.h"

#include "tasres/error.h"
#include "tasres/nn/ops.h"

namespace tasres::metrics {

std::vector<double> IntermediateWeights(int repeats, double w) {
  std::vector<double> out;
  for (int i = 1; i < repeats; ++i) out.push_back(std::pow(w, repeats - i));
  return out;
}

double CombineLosses(double loss_last, const std::vector<double>& loss_i, double w) {
  const std::vector<double> weights =
      IntermediateWeights(static_cast<int>(loss_i.size()) + 1, w);
  double num = loss_last, den = 1.0;
  for (std::size_t i = 0; i < loss_i.size(); ++i) {
    num += weights[i] * loss_i[i];
    den += weights[i];
  }
  return num / den;
}

nn::Var TotalLoss(nn::Graph& g, const model::ForwardOutput& out, const nn::Matrix& s,
                  std::size_t intermediates_expected, const LossConfig& cfg,
                  LossBreakdown* breakdown) {
  if (out.intermediates.size() != intermediates_expected)
    Fail(ErrorCode::kInvalidArgument,
         "loss expects " + std::to_string(intermediates_expected) + " intermediate outputs, got " +
             std::to_string(out.intermediates.size()));
  const std::size_t n = out.intermediates.size();
  const std::vector<double> weights = IntermediateWeights(static_cast<int>(n) + 1, cfg.w);
  double den = 1.0;
  for (double v : weights) den += v;

  std::vector<nn::Var> terms{nn::Scale(g, nn::SiSnr(g, out.s_hat, s, cfg.zero_mean), -1.0)};
  std::vector<double> coeffs{1.0 / den};
  for (std::size_t i = 0; i < n; ++i) {
    terms.push_back(nn::Scale(g, nn::SiSnr(g, out.intermediates[i], s, cfg.zero_mean), -1.0));
    coeffs.push_back(weights[i] / den);
  }
  const nn::Var total = nn::WeightedSum(g, terms, coeffs);
  if (breakdown) {
    breakdown->w = cfg.w;
    breakdown->loss_last = g.value(terms[0])(0, 0);
    breakdown->loss_i.clear();
    for (std::size_t i = 1; i < terms.size(); ++i)
      breakdown->loss_i.push_back(g.value(terms[i])(0, 0));
    breakdown->total = g.value(total)(0, 0);
  }
  return total;
}

}  // namespace tasres::metrics
