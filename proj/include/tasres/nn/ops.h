// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_NN_OPS_H_
#define TASRES_NN_OPS_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tasres/audio/framing.h"
#include "tasres/nn/graph.h"

namespace tasres::nn {

// Differentiable layer primitives. Latents are F x K matrices (features x
// frames); waveforms are T x 1. An invalid Var passed as a bias means "no
// bias".

Var Add(Graph& g, Var a, Var b);
Var Sub(Graph& g, Var a, Var b);
Var Mul(Graph& g, Var a, Var b);
Var Scale(Graph& g, Var x, double factor);
// x (F x K) times s (F x 1) broadcast over frames.
Var ScaleRows(Graph& g, Var x, Var s);
Var ConcatRows(Graph& g, Var top, Var bottom);
// Sum of all entries, 1 x 1.
Var Sum(Graph& g, Var x);
// sum_i weights[i] * terms[i] for 1 x 1 terms.
Var WeightedSum(Graph& g, std::span<const Var> terms, std::span<const double> weights);

// Pointwise convolution: w (O x I), optional b (O x 1).
Var Conv1x1(Graph& g, Var x, Var w, Var b);

// Dilated 1-D convolution that keeps the frame count. w is O x (I * kernel)
// with tap j in columns [j*I, (j+1)*I). Output frame t reads input frames
// t - (kernel-1)*dilation + lookahead + j*dilation; frames outside [0, K)
// are zero. lookahead = 0 is causal.
Var Conv1d(Graph& g, Var x, Var w, Var b, int kernel, int dilation, int lookahead);

// Per-feature dilated convolution, w is F x kernel; same padding rule as
// Conv1d.
Var DepthwiseConv(Graph& g, Var x, Var w, Var b, int dilation, int lookahead);

// max(x, 0) + slope * min(x, 0) with a scalar (1 x 1) slope.
Var PRelu(Graph& g, Var x, Var slope);
Var Sigmoid(Graph& g, Var x);

// How the variance estimate centers past frames.
enum class ElnCentering {
  kPerFrame,      // frame k-p centered by its own running mean E_{k-p}
  kCurrentFrame,  // every frame in the window centered by E_k
};

struct ElnConfig {
  double alpha = std::pow(0.001, 1.0 / 640.0);
  int n_taps = 640;
  double eps = 1e-8;
  double omega = 0.5;
  ElnCentering centering = ElnCentering::kPerFrame;

  void Validate() const;
};

// Exponential layer normalization over features with finite-window
// exponentially weighted statistics:
//   E_k = (1-alpha)/F sum_{p=0..N} alpha^p sum_j f_{k-p,j}
//   D_k = (1-alpha)/F sum_{p=0..N} alpha^p sum_j (f_{k-p,j} - E_{k-p})^2
//   out_k = (f_k - E_k) / (D_k + eps)^omega * gamma + beta
// Frames before 0 are zeros. gamma and beta are F x 1.
Var Eln(Graph& g, Var x, Var gamma, Var beta, const ElnConfig& cfg);

// Waveform (T x 1) to frame_len x K frames under the encoder padding policy.
Var FrameWave(Graph& g, Var wave, const FrameSpec& spec);
// frame_len x K frames to a T x 1 waveform (adjoint of FrameWave).
Var OverlapAddFrames(Graph& g, Var frames, std::size_t n_samples, const FrameSpec& spec);

inline constexpr double kSisnrClampDb = 300.0;

// Scale-invariant SNR in dB of `estimate` (T x 1) against the constant
// reference. Values are clamped at kSisnrClampDb (zero gradient there).
Var SiSnr(Graph& g, Var estimate, const Matrix& reference, bool zero_mean = true);

// Causal FIR with geometric taps h_p = c * alpha^p, p = 0..n_taps, applied
// along a sequence via the running-sum recursion, and its adjoint.
std::vector<double> GeometricFir(std::span<const double> x, double alpha, int n_taps,
                                 double c);
std::vector<double> GeometricFirAdjoint(std::span<const double> u, double alpha,
                                        int n_taps, double c);

}  // namespace tasres::nn

#endif  // TASRES_NN_OPS_H_
