// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/model/tasnet.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tasres/audio/rng.h"
#include "tasres/error.h"

namespace tasres::model {

using nn::Graph;
using nn::Matrix;
using nn::Var;

const char* VariantName(Variant v) {
  switch (v) {
    case Variant::kMI: return "MI";
    case Variant::kL: return "L";
    case Variant::kO: return "O";
  }
  return "?";
}

Variant ParseVariant(const std::string& name) {
  if (name == "MI" || name == "mi") return Variant::kMI;
  if (name == "L" || name == "l") return Variant::kL;
  if (name == "O" || name == "o") return Variant::kO;
  Fail(ErrorCode::kConfig, "unknown model variant '" + name + "' (expected MI, L or O)");
}

void ModelConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) Fail(ErrorCode::kConfig, std::string(name) + " must be positive");
  };
  positive(enc_filters, "enc_filters");
  positive(enc_len, "enc_len");
  positive(enc_hop, "enc_hop");
  positive(bottleneck, "bottleneck");
  positive(skip_channels, "skip_channels");
  positive(block_channels, "block_channels");
  positive(block_kernel, "block_kernel");
  positive(mi_dconv_kernel, "mi_dconv_kernel");
  positive(repeats, "repeats");
  positive(blocks_per_repeat, "blocks_per_repeat");
  if (enc_len % enc_hop != 0) Fail(ErrorCode::kConfig, "enc_hop must divide enc_len");
  if (lookahead_frames < 0) Fail(ErrorCode::kConfig, "lookahead_frames must be >= 0");
  if (!(norm_star_omega > 0.0 && norm_star_omega <= 1.0))
    Fail(ErrorCode::kConfig, "norm_star_omega must be in (0, 1]");
  try {
    eln.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
}

int ModelConfig::LatencySamples() const { return enc_len - 1 + enc_hop * lookahead_frames; }

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int ParseInt(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    Fail(ErrorCode::kConfig, "model." + key + ": expected an integer, got '" + value + "'");
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    Fail(ErrorCode::kConfig, "model." + key + ": expected a number, got '" + value + "'");
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  Fail(ErrorCode::kConfig, "model." + key + ": expected true/false, got '" + value + "'");
}

const char* CenteringName(nn::ElnCentering c) {
  return c == nn::ElnCentering::kPerFrame ? "per_frame" : "current_frame";
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ModelConfigToKeyValues(const ModelConfig& c) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"variant", VariantName(c.variant)},
      {"enc_filters", std::to_string(c.enc_filters)},
      {"enc_len", std::to_string(c.enc_len)},
      {"enc_hop", std::to_string(c.enc_hop)},
      {"bottleneck", std::to_string(c.bottleneck)},
      {"skip_channels", std::to_string(c.skip_channels)},
      {"block_channels", std::to_string(c.block_channels)},
      {"block_kernel", std::to_string(c.block_kernel)},
      {"mi_dconv_kernel", std::to_string(c.mi_dconv_kernel)},
      {"repeats", std::to_string(c.repeats)},
      {"blocks_per_repeat", std::to_string(c.blocks_per_repeat)},
      {"lookahead_frames", std::to_string(c.lookahead_frames)},
      {"eln_alpha", FormatDouble(c.eln.alpha)},
      {"eln_taps", std::to_string(c.eln.n_taps)},
      {"eln_eps", FormatDouble(c.eln.eps)},
      {"eln_omega", FormatDouble(c.eln.omega)},
      {"eln_centering", CenteringName(c.eln.centering)},
      {"norm_star_omega", FormatDouble(c.norm_star_omega)},
      {"share_output_block", b(c.share_output_block)},
      {"mi_prelu_after_dconv", b(c.mi_prelu_after_dconv)},
      {"mi_residual_after_norm", b(c.mi_residual_after_norm)},
  };
}

void SetModelConfigValue(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "variant") c.variant = ParseVariant(value);
  else if (key == "enc_filters") c.enc_filters = ParseInt(key, value);
  else if (key == "enc_len") c.enc_len = ParseInt(key, value);
  else if (key == "enc_hop") c.enc_hop = ParseInt(key, value);
  else if (key == "bottleneck") c.bottleneck = ParseInt(key, value);
  else if (key == "skip_channels") c.skip_channels = ParseInt(key, value);
  else if (key == "block_channels") c.block_channels = ParseInt(key, value);
  else if (key == "block_kernel") c.block_kernel = ParseInt(key, value);
  else if (key == "mi_dconv_kernel") c.mi_dconv_kernel = ParseInt(key, value);
  else if (key == "repeats") c.repeats = ParseInt(key, value);
  else if (key == "blocks_per_repeat") c.blocks_per_repeat = ParseInt(key, value);
  else if (key == "lookahead_frames") c.lookahead_frames = ParseInt(key, value);
  else if (key == "eln_alpha") c.eln.alpha = ParseDouble(key, value);
  else if (key == "eln_taps") c.eln.n_taps = ParseInt(key, value);
  else if (key == "eln_eps") c.eln.eps = ParseDouble(key, value);
  else if (key == "eln_omega") c.eln.omega = ParseDouble(key, value);
  else if (key == "eln_centering") {
    if (value == "per_frame") c.eln.centering = nn::ElnCentering::kPerFrame;
    else if (value == "current_frame") c.eln.centering = nn::ElnCentering::kCurrentFrame;
    else Fail(ErrorCode::kConfig, "model.eln_centering: expected per_frame or current_frame");
  } else if (key == "norm_star_omega") c.norm_star_omega = ParseDouble(key, value);
  else if (key == "share_output_block") c.share_output_block = ParseBool(key, value);
  else if (key == "mi_prelu_after_dconv") c.mi_prelu_after_dconv = ParseBool(key, value);
  else if (key == "mi_residual_after_norm") c.mi_residual_after_norm = ParseBool(key, value);
  else Fail(ErrorCode::kConfig, "unknown key model." + key);
}

std::string SerializeModelConfig(const ModelConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : ModelConfigToKeyValues(cfg)) out += k + "=" + v + "\n";
  return out;
}

ModelConfig ParseModelConfig(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) Fail(ErrorCode::kConfig, "malformed model config line: " + line);
    SetModelConfigValue(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  cfg.Validate();
  return cfg;
}

std::string LayerPrefix(int layer) { return "layer" + std::to_string(layer); }

std::string BlockPrefix(int layer, int block) {
  return LayerPrefix(layer) + ".block" + std::to_string(block);
}

TasNet::TasNet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  // Lookahead goes to the depthwise convs of the last layers first, each
  // taking as much as its receptive field allows.
  const int layers = cfg_.repeats;
  lookahead_.resize(layers);
  for (int i = 0; i < layers; ++i) {
    const bool extra = cfg_.variant == Variant::kO && i > 0;
    lookahead_[i].assign(cfg_.blocks_per_repeat + (extra ? 1 : 0), 0);
  }
  int remaining = cfg_.lookahead_frames;
  for (int i = layers - 1; i >= 0 && remaining > 0; --i) {
    const bool extra = cfg_.variant == Variant::kO && i > 0;
    for (int j = 0; j < BlocksInLayer(i) && remaining > 0; ++j) {
      const int dilation = extra ? (j == 0 ? 1 : 1 << (j - 1)) : 1 << j;
      const int take = std::min(remaining, (cfg_.block_kernel - 1) * dilation);
      lookahead_[i][j] = take;
      remaining -= take;
    }
  }
  if (remaining > 0)
    Fail(ErrorCode::kConfig, "lookahead_frames exceeds the receptive field of the network");
  Build(seed);
}

void TasNet::Build(std::uint64_t seed) {
  Rng rng(seed);
  const int n = cfg_.enc_filters, l = cfg_.enc_len, b = cfg_.bottleneck;
  const int sc = cfg_.skip_channels, h = cfg_.block_channels;

  auto uniform = [&](const std::string& name, int rows, int cols, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-bound, bound);
    params_.Add(name, std::move(m));
  };
  auto conv = [&](const std::string& name, int out, int in, int kernel = 1) {
    uniform(name + ".w", out, in * kernel, in * kernel);
    uniform(name + ".b", out, 1, in * kernel);
  };
  auto norm = [&](const std::string& name, int feats) {
    params_.Add(name + ".gamma", Matrix::Ones(feats, 1));
    params_.Add(name + ".beta", Matrix::Zero(feats, 1));
  };
  auto prelu = [&](const std::string& name) {
    params_.Add(name, Matrix::Constant(1, 1, 0.25));
  };
  auto block = [&](const std::string& p) {
    conv(p + ".in", h, b);
    prelu(p + ".prelu1");
    norm(p + ".norm1", h);
    uniform(p + ".dconv.w", h, cfg_.block_kernel, cfg_.block_kernel);
    uniform(p + ".dconv.b", h, 1, cfg_.block_kernel);
    prelu(p + ".prelu2");
    norm(p + ".norm2", h);
    conv(p + ".res", b, h);
    conv(p + ".skip", sc, h);
  };
  auto output_block = [&](const std::string& p) {
    prelu(p + ".prelu");
    conv(p + ".proj", n, sc);
  };

  uniform("enc_a.w", n, l, l);
  if (cfg_.variant == Variant::kMI) uniform("enc_b.w", n, l, l);
  norm("bottleneck.norm", n);
  conv("bottleneck.proj", b, n);
  for (int i = 0; i < cfg_.repeats; ++i) {
    const std::string lp = LayerPrefix(i);
    if (i > 0 && cfg_.variant != Variant::kO) {
      const std::string mp = lp + ".mi";
      if (!cfg_.share_output_block) output_block(mp + ".ob");
      params_.Add(mp + ".lambda", Matrix::Constant(n, 1, nn::InverseSoftplus(1.0)),
                  nn::Constraint::kPositive);
      norm(mp + ".sub_norm", n);
      conv(mp + ".sub_proj", b, n);
      if (cfg_.variant == Variant::kMI) {
        norm(mp + ".b_norm", n);
        conv(mp + ".b_proj", b, n);
      }
      norm(mp + ".cat_norm", 2 * b);
      conv(mp + ".in", b, 2 * b);
      uniform(mp + ".dconv.w", b, cfg_.mi_dconv_kernel, cfg_.mi_dconv_kernel);
      uniform(mp + ".dconv.b", b, 1, cfg_.mi_dconv_kernel);
      prelu(mp + ".prelu");
      norm(mp + ".out_norm", b);
      conv(mp + ".res", b, 2 * b);
    }
    if (i > 0 && cfg_.variant == Variant::kO) block(lp + ".extra");
    for (int j = 0; j < cfg_.blocks_per_repeat; ++j) block(BlockPrefix(i, j));
  }
  output_block("output");
  uniform("dec.w", l, n, n);
}

Var TasNet::EncodeVar(Graph& g, std::span<const double> wave, const std::string& prefix) const {
  if (wave.empty()) Fail(ErrorCode::kEmptyInput, "encoder input is empty");
  Matrix w = Eigen::Map<const Matrix>(wave.data(), static_cast<Eigen::Index>(wave.size()), 1);
  const Var frames = nn::FrameWave(g, g.Constant(std::move(w)), cfg_.frame_spec());
  return nn::Conv1x1(g, frames, P(g, prefix + ".w"), Var{});
}

Var TasNet::DecodeVar(Graph& g, Var latent, std::size_t n_samples) const {
  const Var frames = nn::Conv1x1(g, latent, P(g, "dec.w"), Var{});
  return nn::OverlapAddFrames(g, frames, n_samples, cfg_.frame_spec());
}

Var TasNet::Norm(Graph& g, Var x, const std::string& prefix, double omega) const {
  nn::ElnConfig c = cfg_.eln;
  c.omega = omega;
  return nn::Eln(g, x, P(g, prefix + ".gamma"), P(g, prefix + ".beta"), c);
}

std::pair<Var, Var> TasNet::ConvBlock(Graph& g, Var x, const std::string& p, int dilation,
                                      int lookahead) const {
  const double omega = cfg_.eln.omega;
  Var y = nn::Conv1x1(g, x, P(g, p + ".in.w"), P(g, p + ".in.b"));
  y = Norm(g, nn::PRelu(g, y, P(g, p + ".prelu1")), p + ".norm1", omega);
  y = nn::DepthwiseConv(g, y, P(g, p + ".dconv.w"), P(g, p + ".dconv.b"), dilation, lookahead);
  y = Norm(g, nn::PRelu(g, y, P(g, p + ".prelu2")), p + ".norm2", omega);
  const Var res = nn::Conv1x1(g, y, P(g, p + ".res.w"), P(g, p + ".res.b"));
  const Var skip = nn::Conv1x1(g, y, P(g, p + ".skip.w"), P(g, p + ".skip.b"));
  return {nn::Add(g, x, res), skip};
}

Var TasNet::OutputBlock(Graph& g, Var skip_sum, const std::string& p) const {
  const Var y = nn::PRelu(g, skip_sum, P(g, p + ".prelu"));
  return nn::Sigmoid(g, nn::Conv1x1(g, y, P(g, p + ".proj.w"), P(g, p + ".proj.b")));
}

TasNet::MiOut TasNet::MiBlock(Graph& g, const std::string& p, Var a, Var b, Var skip_sum) const {
  const int kb = cfg_.bottleneck;
  const Var mask = OutputBlock(g, skip_sum, cfg_.share_output_block ? "output" : p + ".ob");
  const Var f_o = nn::Mul(g, mask, a);
  const Var f_sub = nn::Sub(g, a, nn::ScaleRows(g, f_o, P(g, p + ".lambda")));
  const Var sub = nn::Conv1x1(g, Norm(g, f_sub, p + ".sub_norm", cfg_.norm_star_omega),
                              P(g, p + ".sub_proj.w"), P(g, p + ".sub_proj.b"));
  Var stream_b;
  if (cfg_.variant == Variant::kMI) {
    stream_b = nn::Conv1x1(g, Norm(g, b, p + ".b_norm", cfg_.norm_star_omega),
                           P(g, p + ".b_proj.w"), P(g, p + ".b_proj.b"));
  } else {
    stream_b = g.Constant(Matrix::Zero(kb, g.value(a).cols()));
  }
  const Var cat = nn::ConcatRows(g, sub, stream_b);
  const Var cat_norm = Norm(g, cat, p + ".cat_norm", cfg_.eln.omega);
  Var y = nn::Conv1x1(g, cat_norm, P(g, p + ".in.w"), P(g, p + ".in.b"));
  if (!cfg_.mi_prelu_after_dconv) y = nn::PRelu(g, y, P(g, p + ".prelu"));
  y = nn::DepthwiseConv(g, y, P(g, p + ".dconv.w"), P(g, p + ".dconv.b"), 1, 0);
  if (cfg_.mi_prelu_after_dconv) y = nn::PRelu(g, y, P(g, p + ".prelu"));
  y = Norm(g, y, p + ".out_norm", cfg_.eln.omega);
  const Var res = nn::Conv1x1(g, cfg_.mi_residual_after_norm ? cat_norm : cat,
                              P(g, p + ".res.w"), P(g, p + ".res.b"));
  return {nn::Add(g, y, res), f_o, mask};
}

ForwardOutput TasNet::Forward(Graph& g, std::span<const double> s_aec,
                              std::span<const double> d_hat) const {
  if (s_aec.empty()) Fail(ErrorCode::kEmptyInput, "s_aec is empty");
  if (cfg_.variant == Variant::kMI && d_hat.size() != s_aec.size())
    Fail(ErrorCode::kInvalidArgument, "s_aec and d_hat lengths differ");
  const std::size_t n_samples = s_aec.size();

  const Var a = EncodeVar(g, s_aec, "enc_a");
  const Var b = cfg_.variant == Variant::kMI ? EncodeVar(g, d_hat, "enc_b") : Var{};
  Var c = nn::Conv1x1(g, Norm(g, a, "bottleneck.norm", cfg_.eln.omega),
                      P(g, "bottleneck.proj.w"), P(g, "bottleneck.proj.b"));
  Var skip_sum;
  auto add_skip = [&](Var skip) { skip_sum = skip_sum.valid() ? nn::Add(g, skip_sum, skip) : skip; };

  ForwardOutput out;
  for (int i = 0; i < cfg_.repeats; ++i) {
    int j0 = 0;
    if (i > 0 && cfg_.variant != Variant::kO) {
      const MiOut mi = MiBlock(g, LayerPrefix(i) + ".mi", a, b, skip_sum);
      c = nn::Add(g, c, mi.inject);
      out.intermediates.push_back(DecodeVar(g, mi.f_o, n_samples));
      out.mi_masks.push_back(mi.mask);
    }
    if (i > 0 && cfg_.variant == Variant::kO) {
      auto [res, skip] = ConvBlock(g, c, LayerPrefix(i) + ".extra", 1, lookahead_[i][0]);
      c = res;
      add_skip(skip);
      j0 = 1;
    }
    for (int j = 0; j < cfg_.blocks_per_repeat; ++j) {
      auto [res, skip] = ConvBlock(g, c, BlockPrefix(i, j), 1 << j, lookahead_[i][j0 + j]);
      c = res;
      add_skip(skip);
    }
  }
  out.mask = OutputBlock(g, skip_sum, "output");
  out.s_hat = DecodeVar(g, nn::Mul(g, out.mask, a), n_samples);
  return out;
}

std::vector<double> TasNet::Infer(std::span<const double> s_aec,
                                  std::span<const double> d_hat) const {
  Graph g;
  const ForwardOutput out = Forward(g, s_aec, d_hat);
  const Matrix& v = g.value(out.s_hat);
  return {v.data(), v.data() + v.size()};
}

Matrix TasNet::Encode(std::span<const double> wave, bool stream_b) const {
  if (stream_b && cfg_.variant != Variant::kMI)
    Fail(ErrorCode::kInvalidArgument, "only variant MI has a stream-B encoder");
  Graph g;
  return g.value(EncodeVar(g, wave, stream_b ? "enc_b" : "enc_a"));
}

std::vector<double> TasNet::Decode(const Matrix& latent, std::size_t n_samples) const {
  Require(latent.rows() == cfg_.enc_filters, "decode: latent must have enc_filters rows");
  Graph g;
  const Matrix& v = g.value(DecodeVar(g, g.Constant(latent), n_samples));
  return {v.data(), v.data() + v.size()};
}

}  // namespace tasres::model
