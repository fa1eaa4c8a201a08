// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_TESTS_COMMON_ORACLES_H_
#define TASRES_TESTS_COMMON_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tasres/audio/rng.h"
#include "tasres/nn/graph.h"
#include "tasres/nn/ops.h"

namespace tasres::testing {

using nn::Matrix;

inline Matrix RandomMatrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Normal();
  return m;
}

// Direct double sum over the window, no recursion.
inline Matrix BruteForceEln(const Matrix& f, const Eigen::VectorXd& gamma,
                            const Eigen::VectorXd& beta, const nn::ElnConfig& cfg) {
  const Eigen::Index feats = f.rows();
  const Eigen::Index frames = f.cols();
  const double c = (1.0 - cfg.alpha) / static_cast<double>(feats);
  std::vector<double> mean(frames, 0.0), var(frames, 0.0);
  for (Eigen::Index k = 0; k < frames; ++k) {
    double acc = 0.0;
    for (int p = 0; p <= cfg.n_taps && p <= k; ++p) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < feats; ++j) s += f(j, k - p);
      acc += std::pow(cfg.alpha, p) * s;
    }
    mean[k] = c * acc;
  }
  for (Eigen::Index k = 0; k < frames; ++k) {
    double acc = 0.0;
    for (int p = 0; p <= cfg.n_taps && p <= k; ++p) {
      const double center =
          cfg.centering == nn::ElnCentering::kPerFrame ? mean[k - p] : mean[k];
      double s = 0.0;
      for (Eigen::Index j = 0; j < feats; ++j) s += std::pow(f(j, k - p) - center, 2);
      acc += std::pow(cfg.alpha, p) * s;
    }
    if (cfg.centering == nn::ElnCentering::kCurrentFrame) {
      // Zero frames before the start still contribute (0 - E_k)^2.
      for (int p = static_cast<int>(k) + 1; p <= cfg.n_taps; ++p)
        acc += std::pow(cfg.alpha, p) * static_cast<double>(feats) * mean[k] * mean[k];
    }
    var[k] = c * acc;
  }
  Matrix out(feats, frames);
  for (Eigen::Index k = 0; k < frames; ++k)
    for (Eigen::Index j = 0; j < feats; ++j)
      out(j, k) = (f(j, k) - mean[k]) / std::pow(std::max(var[k], 0.0) + cfg.eps, cfg.omega) *
                      gamma[j] +
                  beta[j];
  return out;
}

// Naive triple loop; w is O x (I * kernel) with tap-major column blocks.
inline Matrix NaiveConv1d(const Matrix& x, const Matrix& w, const Eigen::VectorXd* b, int kernel,
                          int dilation, int lookahead) {
  const Eigen::Index in = x.rows();
  const Eigen::Index frames = x.cols();
  Matrix out = Matrix::Zero(w.rows(), frames);
  for (Eigen::Index o = 0; o < w.rows(); ++o)
    for (Eigen::Index t = 0; t < frames; ++t) {
      double acc = b ? (*b)[o] : 0.0;
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = t - (kernel - 1) * dilation + lookahead + j * dilation;
        if (src < 0 || src >= frames) continue;
        for (Eigen::Index i = 0; i < in; ++i) acc += w(o, j * in + i) * x(i, src);
      }
      out(o, t) = acc;
    }
  return out;
}

inline Matrix NaiveDepthwise(const Matrix& x, const Matrix& w, int dilation, int lookahead) {
  const int kernel = static_cast<int>(w.cols());
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index f = 0; f < x.rows(); ++f)
    for (Eigen::Index t = 0; t < x.cols(); ++t)
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = t - (kernel - 1) * dilation + lookahead + j * dilation;
        if (src >= 0 && src < x.cols()) out(f, t) += w(f, j) * x(f, src);
      }
  return out;
}

struct GradCheckResult {
  bool ok = true;
  double worst_rel = 0.0;
  std::string worst;
  int checked = 0;
};

// Builds a scalar from leaves holding `inputs`; the analytic gradient of
// every entry is compared with a central difference of step h. An entry
// passes when |a - n| <= rtol * max(|a|, |n|) or |a - n| <= atol.
using ScalarBuilder = std::function<nn::Var(nn::Graph&, std::span<const nn::Var>)>;

inline GradCheckResult CheckGradients(std::vector<Matrix> inputs, const ScalarBuilder& build,
                                      double h = 1e-5, double rtol = 1e-4,
                                      double atol = 1e-8) {
  auto evaluate = [&](const std::vector<Matrix>& in) {
    nn::Graph g;
    std::vector<nn::Var> leaves;
    for (const Matrix& m : in) leaves.push_back(g.Record(m, true, nullptr));
    return g.value(build(g, leaves))(0, 0);
  };
  nn::Graph g;
  std::vector<nn::Var> leaves;
  for (const Matrix& m : inputs) leaves.push_back(g.Record(m, true, nullptr));
  const nn::Var out = build(g, leaves);
  g.Backward(out);

  GradCheckResult result;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Matrix analytic = g.has_grad(leaves[i]) ? g.grad(leaves[i])
                                                  : Matrix::Zero(inputs[i].rows(), inputs[i].cols());
    for (Eigen::Index e = 0; e < inputs[i].size(); ++e) {
      const double orig = inputs[i].data()[e];
      inputs[i].data()[e] = orig + h;
      const double up = evaluate(inputs);
      inputs[i].data()[e] = orig - h;
      const double down = evaluate(inputs);
      inputs[i].data()[e] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[e];
      const double diff = std::abs(a - numeric);
      const double scale = std::max(std::abs(a), std::abs(numeric));
      ++result.checked;
      if (diff <= atol) continue;
      const double rel = diff / scale;
      if (rel > result.worst_rel) {
        result.worst_rel = rel;
        result.worst = "input " + std::to_string(i) + " entry " + std::to_string(e) +
                       ": analytic " + std::to_string(a) + " numeric " + std::to_string(numeric);
      }
      if (rel > rtol) result.ok = false;
    }
  }
  return result;
}

// Central differences over every stored parameter value of `store`,
// compared with the gradients left in Param::grad by `loss_and_grad`
// (which must zero and then fill them). `loss` evaluates without gradients.
inline GradCheckResult CheckParamGradients(nn::ParameterStore& store,
                                           const std::function<double()>& loss,
                                           const std::function<void()>& loss_and_grad,
                                           double h = 1e-5, double rtol = 1e-4,
                                           double atol = 1e-8) {
  loss_and_grad();
  GradCheckResult result;
  for (nn::Param* p : store.All()) {
    const Matrix analytic = p->grad;
    for (Eigen::Index e = 0; e < p->values.size(); ++e) {
      const double orig = p->values.data()[e];
      p->values.data()[e] = orig + h;
      const double up = loss();
      p->values.data()[e] = orig - h;
      const double down = loss();
      p->values.data()[e] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[e];
      const double diff = std::abs(a - numeric);
      ++result.checked;
      if (diff <= atol) continue;
      const double rel = diff / std::max(std::abs(a), std::abs(numeric));
      if (rel > result.worst_rel) {
        result.worst_rel = rel;
        result.worst = p->name + "[" + std::to_string(e) + "]: analytic " + std::to_string(a) +
                       " numeric " + std::to_string(numeric);
      }
      if (rel > rtol) result.ok = false;
    }
  }
  return result;
}

// Random linear read-out so every output entry gets a distinct gradient.
inline nn::Var Readout(nn::Graph& g, nn::Var x, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix& v = g.value(x);
  return nn::Sum(g, nn::Mul(g, x, g.Constant(RandomMatrix(rng, v.rows(), v.cols()))));
}

}  // namespace tasres::testing

#endif  // TASRES_TESTS_COMMON_ORACLES_H_
