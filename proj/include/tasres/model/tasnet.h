// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_MODEL_TASNET_H_
#define TASRES_MODEL_TASNET_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tasres/audio/framing.h"
#include "tasres/nn/graph.h"
#include "tasres/nn/ops.h"
#include "tasres/nn/param.h"

namespace tasres::model {

// MI: two encoders and MI Conv blocks fed by s_AEC and d_hat.
// L:  MI Conv blocks without the d_hat stream.
// O:  single-stream Conv-TasNet with one extra 1-D Conv block per layer
//     after the first.
enum class Variant { kMI, kL, kO };

const char* VariantName(Variant v);
Variant ParseVariant(const std::string& name);

struct ModelConfig {
  int enc_filters = 512;      // N
  int enc_len = 40;           // L
  int enc_hop = 10;
  int bottleneck = 256;       // B
  int skip_channels = 256;    // Sc
  int block_channels = 512;   // H
  int block_kernel = 3;       // P
  int mi_dconv_kernel = 128;
  int repeats = 4;            // R
  int blocks_per_repeat = 8;  // M
  Variant variant = Variant::kMI;
  // Future frames the network may read. 0 is causal.
  int lookahead_frames = 17;
  nn::ElnConfig eln;
  double norm_star_omega = 0.4;
  // MI blocks reuse the final Output block weights instead of owning one.
  bool share_output_block = false;
  // MI main path: PReLU after the D-Conv (true) or after the 1x1 conv.
  bool mi_prelu_after_dconv = true;
  // MI residual 1x1 reads the concatenation before (false) or after its eLN.
  bool mi_residual_after_norm = false;

  void Validate() const;
  FrameSpec frame_spec() const { return {enc_len, enc_hop}; }
  // Samples between an input sample and the first output sample that can
  // depend on it, counted backwards: output n reads input up to n + latency.
  int LatencySamples() const;
};

// key = value pairs in a fixed order; values print with %.17g so parsing
// the result reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> ModelConfigToKeyValues(const ModelConfig& cfg);
// Throws kConfig for an unknown key or a malformed value.
void SetModelConfigValue(ModelConfig& cfg, const std::string& key, const std::string& value);
std::string SerializeModelConfig(const ModelConfig& cfg);
ModelConfig ParseModelConfig(const std::string& text);

struct ForwardOutput {
  nn::Var s_hat;                       // T x 1
  std::vector<nn::Var> intermediates;  // decoded f_O_i, i = 1..R-1
  nn::Var mask;                        // final mask, N x K
  std::vector<nn::Var> mi_masks;       // masks inside the MI blocks
};

class TasNet {
 public:
  // Parameters are drawn from Rng(seed).
  explicit TasNet(const ModelConfig& cfg, std::uint64_t seed = 0);

  const ModelConfig& config() const { return cfg_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }

  // Records the full network on g. d_hat is ignored by variants L and O and
  // may be empty for them.
  ForwardOutput Forward(nn::Graph& g, std::span<const double> s_aec,
                        std::span<const double> d_hat) const;

  // Final estimate only, no gradients kept.
  std::vector<double> Infer(std::span<const double> s_aec, std::span<const double> d_hat) const;

  // Encoder of stream A or B as a constant (N x K).
  nn::Matrix Encode(std::span<const double> wave, bool stream_b = false) const;
  // Shared decoder applied to a latent, trimmed to n_samples.
  std::vector<double> Decode(const nn::Matrix& latent, std::size_t n_samples) const;

  // Lookahead frames of the depthwise conv of block j in layer i. Index 0
  // of an O-variant layer i >= 1 is its extra block.
  int BlockLookahead(int layer, int block) const { return lookahead_[layer][block]; }
  int BlocksInLayer(int layer) const { return static_cast<int>(lookahead_[layer].size()); }

 private:
  struct MiOut {
    nn::Var inject;
    nn::Var f_o;
    nn::Var mask;
  };

  void Build(std::uint64_t seed);
  nn::Var P(nn::Graph& g, const std::string& name) const { return g.Parameter(params_.Get(name)); }
  nn::Var EncodeVar(nn::Graph& g, std::span<const double> wave, const std::string& prefix) const;
  nn::Var DecodeVar(nn::Graph& g, nn::Var latent, std::size_t n_samples) const;
  nn::Var Norm(nn::Graph& g, nn::Var x, const std::string& prefix, double omega) const;
  std::pair<nn::Var, nn::Var> ConvBlock(nn::Graph& g, nn::Var x, const std::string& prefix,
                                        int dilation, int lookahead) const;
  nn::Var OutputBlock(nn::Graph& g, nn::Var skip_sum, const std::string& prefix) const;
  MiOut MiBlock(nn::Graph& g, const std::string& prefix, nn::Var a, nn::Var b,
                nn::Var skip_sum) const;

  ModelConfig cfg_;
  nn::ParameterStore params_;
  std::vector<std::vector<int>> lookahead_;
};

std::string LayerPrefix(int layer);
std::string BlockPrefix(int layer, int block);

}  // namespace tasres::model

#endif  // TASRES_MODEL_TASNET_H_
