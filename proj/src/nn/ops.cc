// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "tasres/error.h"

namespace tasres::nn {
namespace {

bool AnyGrad(const Graph& g, std::initializer_list<Var> vars) {
  for (Var v : vars)
    if (v.valid() && g.requires_grad(v)) return true;
  return false;
}

void CheckSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    Fail(ErrorCode::kInvalidArgument, std::string(op) + ": shape mismatch");
}

// Column range [t0, t1) of the output that reads valid input columns at
// offset `shift` (input column = output column + shift).
struct ColumnRange {
  Eigen::Index t0, t1;
  Eigen::Index n() const { return std::max<Eigen::Index>(0, t1 - t0); }
};

ColumnRange ValidRange(Eigen::Index frames, Eigen::Index shift) {
  return {std::max<Eigen::Index>(0, -shift), std::min(frames, frames - shift)};
}

void CheckPadding(int kernel, int dilation, int lookahead) {
  Require(kernel >= 1 && dilation >= 1, "conv: kernel and dilation must be >= 1");
  Require(lookahead >= 0 && lookahead <= (kernel - 1) * dilation,
          "conv: lookahead must be within the receptive field");
}

}  // namespace

Var Add(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "add");
  return g.Record(g.value(a) + g.value(b), AnyGrad(g, {a, b}), [a, b](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    if (g.requires_grad(a)) g.grad(a) += go;
    if (g.requires_grad(b)) g.grad(b) += go;
  });
}

Var Sub(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "sub");
  return g.Record(g.value(a) - g.value(b), AnyGrad(g, {a, b}), [a, b](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    if (g.requires_grad(a)) g.grad(a) += go;
    if (g.requires_grad(b)) g.grad(b) -= go;
  });
}

Var Mul(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "mul");
  return g.Record(g.value(a).cwiseProduct(g.value(b)), AnyGrad(g, {a, b}),
                  [a, b](Graph& g, int self) {
                    const Matrix& go = g.grad(self);
                    if (g.requires_grad(a)) g.grad(a) += go.cwiseProduct(g.value(b));
                    if (g.requires_grad(b)) g.grad(b) += go.cwiseProduct(g.value(a));
                  });
}

Var Scale(Graph& g, Var x, double factor) {
  return g.Record(g.value(x) * factor, AnyGrad(g, {x}), [x, factor](Graph& g, int self) {
    g.grad(x) += factor * g.grad(self);
  });
}

Var ScaleRows(Graph& g, Var x, Var s) {
  const Matrix& xv = g.value(x);
  const Matrix& sv = g.value(s);
  Require(sv.rows() == xv.rows() && sv.cols() == 1, "scale_rows: shape mismatch");
  Matrix out = (xv.array().colwise() * sv.col(0).array()).matrix();
  return g.Record(std::move(out), AnyGrad(g, {x, s}), [x, s](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    if (g.requires_grad(x))
      g.grad(x).array() += go.array().colwise() * g.value(s).col(0).array();
    if (g.requires_grad(s))
      g.grad(s).col(0) += (go.array() * g.value(x).array()).rowwise().sum().matrix();
  });
}

Var ConcatRows(Graph& g, Var top, Var bottom) {
  const Matrix& a = g.value(top);
  const Matrix& b = g.value(bottom);
  Require(a.cols() == b.cols(), "concat: frame counts differ");
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  const Eigen::Index split = a.rows();
  return g.Record(std::move(out), AnyGrad(g, {top, bottom}),
                  [top, bottom, split](Graph& g, int self) {
                    const Matrix& go = g.grad(self);
                    if (g.requires_grad(top)) g.grad(top) += go.topRows(split);
                    if (g.requires_grad(bottom))
                      g.grad(bottom) += go.bottomRows(go.rows() - split);
                  });
}

Var Sum(Graph& g, Var x) {
  return g.Record(Matrix::Constant(1, 1, g.value(x).sum()), AnyGrad(g, {x}),
                  [x](Graph& g, int self) { g.grad(x).array() += g.grad(self)(0, 0); });
}

Var WeightedSum(Graph& g, std::span<const Var> terms, std::span<const double> weights) {
  Require(terms.size() == weights.size(), "weighted_sum: size mismatch");
  double total = 0.0;
  bool needs_grad = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Require(g.value(terms[i]).size() == 1, "weighted_sum: terms must be scalars");
    total += weights[i] * g.value(terms[i])(0, 0);
    needs_grad = needs_grad || g.requires_grad(terms[i]);
  }
  std::vector<Var> t(terms.begin(), terms.end());
  std::vector<double> w(weights.begin(), weights.end());
  return g.Record(Matrix::Constant(1, 1, total), needs_grad, [t, w](Graph& g, int self) {
    const double go = g.grad(self)(0, 0);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (g.requires_grad(t[i])) g.grad(t[i])(0, 0) += w[i] * go;
  });
}

Var Conv1x1(Graph& g, Var x, Var w, Var b) {
  const Matrix& xv = g.value(x);
  const Matrix& wv = g.value(w);
  if (wv.cols() != xv.rows()) Fail(ErrorCode::kInvalidArgument, "conv1x1: shape mismatch");
  Matrix out = wv * xv;
  if (b.valid()) {
    Require(g.value(b).rows() == wv.rows() && g.value(b).cols() == 1, "conv1x1: bias shape");
    out.colwise() += g.value(b).col(0);
  }
  return g.Record(std::move(out), AnyGrad(g, {x, w, b}), [x, w, b](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    if (g.requires_grad(w)) g.grad(w).noalias() += go * g.value(x).transpose();
    if (g.requires_grad(x)) g.grad(x).noalias() += g.value(w).transpose() * go;
    if (b.valid() && g.requires_grad(b)) g.grad(b).col(0) += go.rowwise().sum();
  });
}

Var Conv1d(Graph& g, Var x, Var w, Var b, int kernel, int dilation, int lookahead) {
  CheckPadding(kernel, dilation, lookahead);
  const Matrix& xv = g.value(x);
  const Matrix& wv = g.value(w);
  const Eigen::Index in = xv.rows();
  const Eigen::Index frames = xv.cols();
  if (wv.cols() != in * kernel) Fail(ErrorCode::kInvalidArgument, "conv1d: shape mismatch");
  const Eigen::Index base = -static_cast<Eigen::Index>(kernel - 1) * dilation + lookahead;
  Matrix out = Matrix::Zero(wv.rows(), frames);
  for (int j = 0; j < kernel; ++j) {
    const Eigen::Index shift = base + static_cast<Eigen::Index>(j) * dilation;
    const ColumnRange r = ValidRange(frames, shift);
    if (r.n() == 0) continue;
    out.middleCols(r.t0, r.n()).noalias() +=
        wv.middleCols(j * in, in) * xv.middleCols(r.t0 + shift, r.n());
  }
  if (b.valid()) {
    Require(g.value(b).rows() == wv.rows() && g.value(b).cols() == 1, "conv1d: bias shape");
    out.colwise() += g.value(b).col(0);
  }
  return g.Record(std::move(out), AnyGrad(g, {x, w, b}),
                  [x, w, b, kernel, base, dilation](Graph& g, int self) {
                    const Matrix& go = g.grad(self);
                    const Matrix& xv = g.value(x);
                    const Matrix& wv = g.value(w);
                    const Eigen::Index in = xv.rows();
                    const Eigen::Index frames = xv.cols();
                    for (int j = 0; j < kernel; ++j) {
                      const Eigen::Index shift = base + static_cast<Eigen::Index>(j) * dilation;
                      const ColumnRange r = ValidRange(frames, shift);
                      if (r.n() == 0) continue;
                      if (g.requires_grad(w))
                        g.grad(w).middleCols(j * in, in).noalias() +=
                            go.middleCols(r.t0, r.n()) *
                            xv.middleCols(r.t0 + shift, r.n()).transpose();
                      if (g.requires_grad(x))
                        g.grad(x).middleCols(r.t0 + shift, r.n()).noalias() +=
                            wv.middleCols(j * in, in).transpose() * go.middleCols(r.t0, r.n());
                    }
                    if (b.valid() && g.requires_grad(b)) g.grad(b).col(0) += go.rowwise().sum();
                  });
}

Var DepthwiseConv(Graph& g, Var x, Var w, Var b, int dilation, int lookahead) {
  const Matrix& xv = g.value(x);
  const Matrix& wv = g.value(w);
  const int kernel = static_cast<int>(wv.cols());
  CheckPadding(kernel, dilation, lookahead);
  if (wv.rows() != xv.rows()) Fail(ErrorCode::kInvalidArgument, "depthwise conv: shape mismatch");
  const Eigen::Index frames = xv.cols();
  const Eigen::Index base = -static_cast<Eigen::Index>(kernel - 1) * dilation + lookahead;
  Matrix out = Matrix::Zero(xv.rows(), frames);
  for (int j = 0; j < kernel; ++j) {
    const Eigen::Index shift = base + static_cast<Eigen::Index>(j) * dilation;
    const ColumnRange r = ValidRange(frames, shift);
    if (r.n() == 0) continue;
    out.middleCols(r.t0, r.n()).array() +=
        xv.middleCols(r.t0 + shift, r.n()).array().colwise() * wv.col(j).array();
  }
  if (b.valid()) {
    Require(g.value(b).rows() == wv.rows() && g.value(b).cols() == 1,
            "depthwise conv: bias shape");
    out.colwise() += g.value(b).col(0);
  }
  return g.Record(std::move(out), AnyGrad(g, {x, w, b}),
                  [x, w, b, kernel, base, dilation](Graph& g, int self) {
                    const Matrix& go = g.grad(self);
                    const Matrix& xv = g.value(x);
                    const Matrix& wv = g.value(w);
                    const Eigen::Index frames = xv.cols();
                    for (int j = 0; j < kernel; ++j) {
                      const Eigen::Index shift = base + static_cast<Eigen::Index>(j) * dilation;
                      const ColumnRange r = ValidRange(frames, shift);
                      if (r.n() == 0) continue;
                      if (g.requires_grad(w))
                        g.grad(w).col(j) += (go.middleCols(r.t0, r.n()).array() *
                                             xv.middleCols(r.t0 + shift, r.n()).array())
                                                .rowwise()
                                                .sum()
                                                .matrix();
                      if (g.requires_grad(x))
                        g.grad(x).middleCols(r.t0 + shift, r.n()).array() +=
                            go.middleCols(r.t0, r.n()).array().colwise() * wv.col(j).array();
                    }
                    if (b.valid() && g.requires_grad(b)) g.grad(b).col(0) += go.rowwise().sum();
                  });
}

Var PRelu(Graph& g, Var x, Var slope) {
  Require(g.value(slope).size() == 1, "prelu: slope must be a scalar");
  const double a = g.value(slope)(0, 0);
  Matrix out = g.value(x).unaryExpr([a](double v) { return v > 0.0 ? v : a * v; });
  return g.Record(std::move(out), AnyGrad(g, {x, slope}), [x, slope](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    const Matrix& xv = g.value(x);
    const double a = g.value(slope)(0, 0);
    if (g.requires_grad(x))
      g.grad(x).array() += go.array() * (xv.array() > 0.0).select(1.0, Matrix::Constant(xv.rows(), xv.cols(), a).array());
    if (g.requires_grad(slope))
      g.grad(slope)(0, 0) += (xv.array() > 0.0).select(0.0, go.array() * xv.array()).sum();
  });
}

Var Sigmoid(Graph& g, Var x) {
  Matrix out = g.value(x).unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return g.Record(std::move(out), AnyGrad(g, {x}), [x](Graph& g, int self) {
    const Matrix& y = g.value(Var{self});
    g.grad(x).array() += g.grad(self).array() * y.array() * (1.0 - y.array());
  });
}

void ElnConfig::Validate() const {
  Require(alpha > 0.0 && alpha < 1.0, "eLN alpha must be in (0, 1)");
  Require(n_taps >= 1, "eLN n_taps must be >= 1");
  Require(eps > 0.0, "eLN eps must be positive");
  Require(omega > 0.0 && omega <= 1.0, "eLN omega must be in (0, 1]");
}

std::vector<double> GeometricFir(std::span<const double> x, double alpha, int n_taps,
                                 double c) {
  const std::size_t n = x.size();
  const std::size_t drop = static_cast<std::size_t>(n_taps) + 1;
  const double tail = c * std::pow(alpha, static_cast<double>(drop));
  std::vector<double> y(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc = alpha * acc + c * x[k];
    if (k >= drop) acc -= tail * x[k - drop];
    y[k] = acc;
  }
  return y;
}

std::vector<double> GeometricFirAdjoint(std::span<const double> u, double alpha, int n_taps,
                                        double c) {
  const std::size_t n = u.size();
  const std::size_t drop = static_cast<std::size_t>(n_taps) + 1;
  const double tail = c * std::pow(alpha, static_cast<double>(drop));
  std::vector<double> z(n);
  double acc = 0.0;
  for (std::size_t m = n; m-- > 0;) {
    acc = alpha * acc + c * u[m];
    if (m + drop < n) acc -= tail * u[m + drop];
    z[m] = acc;
  }
  return z;
}

namespace {

struct ElnCache {
  Matrix xhat;                 // (f - E) / den
  Eigen::RowVectorXd mean;     // E_k
  Eigen::RowVectorXd var;      // D_k (clamped at 0)
  Eigen::RowVectorXd den;      // (D_k + eps)^omega
};

}  // namespace

Var Eln(Graph& g, Var x, Var gamma, Var beta, const ElnConfig& cfg) {
  cfg.Validate();
  const Matrix& f = g.value(x);
  const Eigen::Index feats = f.rows();
  const Eigen::Index frames = f.cols();
  Require(feats > 0, "eLN: zero features");
  Require(g.value(gamma).rows() == feats && g.value(beta).rows() == feats,
          "eLN: gamma/beta must have one entry per feature");
  const double c = (1.0 - cfg.alpha) / static_cast<double>(feats);
  const double tail_gain = std::pow(cfg.alpha, cfg.n_taps + 1);

  auto cache = std::make_shared<ElnCache>();
  std::vector<double> sums(frames);
  for (Eigen::Index k = 0; k < frames; ++k) sums[k] = f.col(k).sum();
  std::vector<double> mean = GeometricFir(sums, cfg.alpha, cfg.n_taps, c);
  cache->mean = Eigen::Map<Eigen::RowVectorXd>(mean.data(), frames);
  Matrix centered = f.rowwise() - cache->mean;

  std::vector<double> var;
  if (cfg.centering == ElnCentering::kPerFrame) {
    std::vector<double> q(frames);
    for (Eigen::Index k = 0; k < frames; ++k) q[k] = centered.col(k).squaredNorm();
    var = GeometricFir(q, cfg.alpha, cfg.n_taps, c);
  } else {
    std::vector<double> sq(frames);
    for (Eigen::Index k = 0; k < frames; ++k) sq[k] = f.col(k).squaredNorm();
    var = GeometricFir(sq, cfg.alpha, cfg.n_taps, c);
    for (Eigen::Index k = 0; k < frames; ++k)
      var[k] -= (1.0 + tail_gain) * mean[k] * mean[k];
  }
  cache->var.resize(frames);
  cache->den.resize(frames);
  for (Eigen::Index k = 0; k < frames; ++k) {
    cache->var[k] = std::max(var[k], 0.0);
    cache->den[k] = std::pow(cache->var[k] + cfg.eps, cfg.omega);
  }
  cache->xhat = centered.array().rowwise() / cache->den.array();
  Matrix out = (cache->xhat.array().colwise() * g.value(gamma).col(0).array()).matrix();
  out.colwise() += g.value(beta).col(0);

  return g.Record(
      std::move(out), AnyGrad(g, {x, gamma, beta}),
      [x, gamma, beta, cfg, c, tail_gain, cache](Graph& g, int self) {
        const Matrix& go = g.grad(self);
        const Matrix& xhat = cache->xhat;
        const Eigen::Index frames = xhat.cols();
        if (g.requires_grad(beta)) g.grad(beta).col(0) += go.rowwise().sum();
        if (g.requires_grad(gamma))
          g.grad(gamma).col(0) += (go.array() * xhat.array()).rowwise().sum().matrix();
        if (!g.requires_grad(x)) return;

        const Matrix& f = g.value(x);
        const Matrix gx = (go.array().colwise() * g.value(gamma).col(0).array()).matrix();
        Matrix df = gx.array().rowwise() / cache->den.array();
        std::vector<double> d_mean(frames), d_var(frames);
        for (Eigen::Index k = 0; k < frames; ++k) {
          const double den = cache->den[k];
          d_mean[k] = -gx.col(k).sum() / den;
          const double d_den = -gx.col(k).dot(xhat.col(k)) / den;
          d_var[k] = d_den * cfg.omega * den / (cache->var[k] + cfg.eps);
        }
        if (cfg.centering == ElnCentering::kPerFrame) {
          const std::vector<double> d_q = GeometricFirAdjoint(d_var, cfg.alpha, cfg.n_taps, c);
          for (Eigen::Index m = 0; m < frames; ++m) {
            // f - E_m = xhat * den
            const double scale = 2.0 * d_q[m] * cache->den[m];
            df.col(m) += scale * xhat.col(m);
            d_mean[m] -= scale * xhat.col(m).sum();
          }
        } else {
          for (Eigen::Index k = 0; k < frames; ++k)
            d_mean[k] -= 2.0 * (1.0 + tail_gain) * cache->mean[k] * d_var[k];
          const std::vector<double> d_sq = GeometricFirAdjoint(d_var, cfg.alpha, cfg.n_taps, c);
          for (Eigen::Index m = 0; m < frames; ++m) df.col(m) += 2.0 * d_sq[m] * f.col(m);
        }
        const std::vector<double> d_sum = GeometricFirAdjoint(d_mean, cfg.alpha, cfg.n_taps, c);
        for (Eigen::Index m = 0; m < frames; ++m) df.col(m).array() += d_sum[m];
        g.grad(x) += df;
      });
}

Var FrameWave(Graph& g, Var wave, const FrameSpec& spec) {
  const Matrix& w = g.value(wave);
  Require(w.cols() == 1, "frame: waveform must be a column");
  const std::size_t n = static_cast<std::size_t>(w.rows());
  std::vector<double> frames = FrameSignal({w.data(), n}, spec);
  const Eigen::Index k = static_cast<Eigen::Index>(PaddedFrameCount(n, spec));
  Matrix out = Eigen::Map<Matrix>(frames.data(), spec.frame_len, k);
  return g.Record(std::move(out), AnyGrad(g, {wave}), [wave, spec, n](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    std::vector<double> back =
        OverlapAdd({go.data(), static_cast<std::size_t>(go.size())},
                   static_cast<std::size_t>(go.cols()), n, spec);
    g.grad(wave).col(0) += Eigen::Map<Eigen::VectorXd>(back.data(), static_cast<Eigen::Index>(n));
  });
}

Var OverlapAddFrames(Graph& g, Var frames, std::size_t n_samples, const FrameSpec& spec) {
  const Matrix& fv = g.value(frames);
  Require(fv.rows() == spec.frame_len, "overlap-add: frame length mismatch");
  std::vector<double> wave = OverlapAdd({fv.data(), static_cast<std::size_t>(fv.size())},
                                        static_cast<std::size_t>(fv.cols()), n_samples, spec);
  Matrix out = Eigen::Map<Matrix>(wave.data(), static_cast<Eigen::Index>(n_samples), 1);
  return g.Record(std::move(out), AnyGrad(g, {frames}), [frames, spec](Graph& g, int self) {
    const Matrix& go = g.grad(self);
    std::vector<double> back =
        FrameSignal({go.data(), static_cast<std::size_t>(go.rows())}, spec);
    Matrix& gf = g.grad(frames);
    const Eigen::Index avail = static_cast<Eigen::Index>(back.size()) / spec.frame_len;
    const Eigen::Index k = std::min(avail, gf.cols());
    gf.leftCols(k) += Eigen::Map<Matrix>(back.data(), spec.frame_len, avail).leftCols(k);
  });
}

Var SiSnr(Graph& g, Var estimate, const Matrix& reference, bool zero_mean) {
  const Matrix& est = g.value(estimate);
  Require(est.cols() == 1 && reference.cols() == 1 && est.rows() == reference.rows(),
          "sisnr: inputs must be equal-length columns");
  Eigen::VectorXd s = reference.col(0);
  Eigen::VectorXd e = est.col(0);
  if (zero_mean) {
    s.array() -= s.mean();
    e.array() -= e.mean();
  }
  const double q = s.squaredNorm();
  if (q <= 0.0) Fail(ErrorCode::kInvalidArgument, "sisnr: reference has zero energy");
  const double a = e.dot(s);
  const double target = a * a / q;
  // Direct residual is more accurate than the difference of energies.
  const Eigen::VectorXd resid = e - (a / q) * s;
  const double noise_direct = resid.squaredNorm();
  double value;
  bool clamped = false;
  if (noise_direct <= 0.0 || target <= 0.0) {
    value = target > 0.0 ? kSisnrClampDb : -kSisnrClampDb;
    clamped = true;
  } else {
    value = 10.0 * std::log10(target / noise_direct);
    if (value > kSisnrClampDb) {
      value = kSisnrClampDb;
      clamped = true;
    } else if (value < -kSisnrClampDb) {
      value = -kSisnrClampDb;
      clamped = true;
    }
  }
  const bool needs = AnyGrad(g, {estimate}) && !clamped;
  return g.Record(Matrix::Constant(1, 1, value), needs,
                  [estimate, s, resid, a, zero_mean](Graph& g, int self) {
                    // value = 10/ln10 * (ln(a^2/q) - ln |e - (a/q) s|^2); the
                    // gradient of the second term is 2 resid / |resid|^2.
                    const double go = g.grad(self)(0, 0);
                    const double k = 10.0 / std::numbers::ln10;
                    Eigen::VectorXd d = k * (2.0 / a * s - 2.0 / resid.squaredNorm() * resid);
                    if (zero_mean) d.array() -= d.mean();
                    g.grad(estimate).col(0) += go * d;
                  });
}

}  // namespace tasres::nn
