// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <numeric>

#include "common/fixtures.h"
#include "common/oracles.h"
#include "tasres/error.h"
#include "tasres/metrics/loss.h"
#include "tasres/model/tasnet.h"
#include "tasres/train/trainer.h"

namespace tasres::model {
namespace {

using nn::Graph;
using nn::Matrix;
using testing::DeskConfig;
using testing::GradCheckConfig;
using testing::RandomSignal;

std::vector<double> Values(const Graph& g, nn::Var v) {
  const Matrix& m = g.value(v);
  return {m.data(), m.data() + m.size()};
}

// Earliest output index that differs after perturbing input sample t.
long FirstChange(const TasNet& net, std::size_t n, std::size_t t) {
  Rng rng(21);
  std::vector<double> a = RandomSignal(rng, n), b = RandomSignal(rng, n);
  const std::vector<double> base = net.Infer(a, b);
  a[t] += 0.5;
  b[t] -= 0.5;
  const std::vector<double> moved = net.Infer(a, b);
  for (std::size_t i = 0; i < n; ++i)
    if (moved[i] != base[i]) return static_cast<long>(i);
  return -1;
}

TEST(ModelConfigTest, DefaultsAndRoundTrip) {
  ModelConfig c;
  EXPECT_EQ(c.enc_filters, 512);
  EXPECT_EQ(c.enc_len, 40);
  EXPECT_EQ(c.enc_hop, 10);
  EXPECT_EQ(c.repeats, 4);
  EXPECT_EQ(c.blocks_per_repeat, 8);
  EXPECT_EQ(c.mi_dconv_kernel, 128);
  EXPECT_EQ(c.LatencySamples(), 209);
  c.lookahead_frames = 0;
  EXPECT_EQ(c.LatencySamples(), 39);
  c.eln.alpha = 0.123456789012345678;
  c.variant = Variant::kO;
  const ModelConfig back = ParseModelConfig(SerializeModelConfig(c));
  EXPECT_EQ(SerializeModelConfig(back), SerializeModelConfig(c));
  EXPECT_EQ(back.eln.alpha, c.eln.alpha);
  EXPECT_THROW(ParseModelConfig("bogus=1\n"), Error);
  EXPECT_THROW(ParseModelConfig("enc_len=41\n"), Error);
  EXPECT_THROW(ParseModelConfig("repeats=x\n"), Error);
}

TEST(ModelConfigTest, ReceptiveFieldOfOneRepeat) {
  const ModelConfig c;
  int span = 1;
  for (int j = 0; j < c.blocks_per_repeat; ++j) span += (c.block_kernel - 1) * (1 << j);
  EXPECT_EQ(span, 511);
}

TEST(ModelTest, LookaheadGoesToTheLastLayer) {
  const TasNet net(ModelConfig{});
  int total = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < net.BlocksInLayer(i); ++j) {
      total += net.BlockLookahead(i, j);
      if (i < 3) {
        EXPECT_EQ(net.BlockLookahead(i, j), 0);
      }
    }
  EXPECT_EQ(total, 17);
  EXPECT_EQ(net.BlockLookahead(3, 0), 2);
  EXPECT_EQ(net.BlockLookahead(3, 1), 4);
  EXPECT_EQ(net.BlockLookahead(3, 2), 8);
  EXPECT_EQ(net.BlockLookahead(3, 3), 3);
}

TEST(ModelTest, ParameterCountsAreFrozen) {
  ModelConfig c;
  EXPECT_EQ(TasNet(c).params().NumScalars(), 15154247u);
  c.variant = Variant::kL;
  EXPECT_EQ(TasNet(c).params().NumScalars(), 14736711u);
  c.variant = Variant::kO;
  EXPECT_EQ(TasNet(c).params().NumScalars(), 14246727u);
  EXPECT_EQ(TasNet(DeskConfig()).params().NumScalars(), 81363u);
}

TEST(ModelTest, EncoderShapesAndIndependence) {
  const TasNet net(DeskConfig(), 3);
  Rng rng(1);
  const std::vector<double> x = RandomSignal(rng, 64000);
  const Matrix a = net.Encode(x);
  EXPECT_EQ(a.rows(), 64);
  EXPECT_EQ(a.cols(), 6400);
  EXPECT_GT((a - net.Encode(x, true)).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_EQ(net.Encode(std::vector<double>(1000, 0.0)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(net.Encode(std::vector<double>{}), Error);
}

TEST(ModelTest, DecoderIsLinear) {
  const TasNet net(DeskConfig(), 4);
  Rng rng(2);
  const Matrix a = testing::RandomMatrix(rng, 64, 50), b = testing::RandomMatrix(rng, 64, 50);
  const auto da = net.Decode(a, 500), db = net.Decode(b, 500), dab = net.Decode(a + b, 500);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_NEAR(dab[i], da[i] + db[i], 1e-12);
  const auto zero = net.Decode(Matrix::Zero(64, 50), 500);
  EXPECT_EQ(*std::max_element(zero.begin(), zero.end()), 0.0);
}

TEST(ModelTest, ForwardShapesMasksAndSharedDecoder) {
  for (Variant v : {Variant::kMI, Variant::kL, Variant::kO}) {
    const TasNet net(DeskConfig(v), 5);
    Rng rng(3);
    const auto a = RandomSignal(rng, 1237), b = RandomSignal(rng, 1237);
    Graph g;
    const ForwardOutput out = net.Forward(g, a, b);
    EXPECT_EQ(g.value(out.s_hat).rows(), 1237);
    EXPECT_EQ(out.intermediates.size(), v == Variant::kO ? 0u : 1u);
    for (nn::Var m : out.mi_masks) {
      EXPECT_GT(g.value(m).minCoeff(), 0.0);
      EXPECT_LT(g.value(m).maxCoeff(), 1.0);
    }
    EXPECT_GT(g.value(out.mask).minCoeff(), 0.0);
    EXPECT_LT(g.value(out.mask).maxCoeff(), 1.0);
    for (nn::Var w : out.intermediates) {
      EXPECT_EQ(g.value(w).rows(), 1237);
      EXPECT_TRUE(g.value(w).allFinite());
    }
    // One decoder weight serves every output.
    int decoders = 0;
    for (const nn::Param* p : net.params().All())
      if (p->name.rfind("dec.", 0) == 0) ++decoders;
    EXPECT_EQ(decoders, 1);
  }
}

TEST(ModelTest, LambdaStaysPositive) {
  TasNet net(DeskConfig(), 6);
  nn::Param& lambda = net.params().Get("layer1.mi.lambda");
  EXPECT_NEAR(lambda.Effective()(0, 0), 1.0, 1e-12);
  lambda.values.setConstant(-50.0);
  EXPECT_GT(lambda.Effective().minCoeff(), 0.0);
}

TEST(ModelTest, VariantLMatchesMiWithStreamBZeroed) {
  TasNet mi(GradCheckConfig(Variant::kMI), 7);
  TasNet l(GradCheckConfig(Variant::kL), 8);
  for (nn::Param* p : l.params().All()) p->values = mi.params().Get(p->name).values;
  for (nn::Param* p : mi.params().All())
    if (p->name.find(".b_proj.") != std::string::npos) p->values.setZero();
  Rng rng(4);
  const auto a = RandomSignal(rng, 300), b = RandomSignal(rng, 300);
  Graph gm, gl;
  const ForwardOutput om = mi.Forward(gm, a, b);
  const ForwardOutput ol = l.Forward(gl, a, {});
  const auto sm = Values(gm, om.s_hat), sl = Values(gl, ol.s_hat);
  for (std::size_t i = 0; i < sm.size(); ++i) EXPECT_NEAR(sm[i], sl[i], 1e-12);
  for (std::size_t k = 0; k < om.intermediates.size(); ++k) {
    const auto im = Values(gm, om.intermediates[k]), il = Values(gl, ol.intermediates[k]);
    for (std::size_t i = 0; i < im.size(); ++i) EXPECT_NEAR(im[i], il[i], 1e-12);
  }
  // Before zeroing, stream B does reach the output.
  TasNet fresh(GradCheckConfig(Variant::kMI), 7);
  auto b2 = b;
  b2[150] += 1.0;
  const auto o1 = fresh.Infer(a, b), o2 = fresh.Infer(a, b2);
  EXPECT_NE(o1, o2);
}

TEST(ModelTest, VariantOIgnoresDhat) {
  const TasNet net(DeskConfig(Variant::kO), 9);
  Rng rng(5);
  const auto a = RandomSignal(rng, 800), b = RandomSignal(rng, 800);
  EXPECT_EQ(net.Infer(a, b), net.Infer(a, RandomSignal(rng, 800)));
  EXPECT_FALSE(net.params().Contains("enc_b.w"));
  EXPECT_TRUE(net.params().Contains("layer1.extra.in.w"));
  EXPECT_FALSE(net.params().Contains("layer0.extra.in.w"));
}

TEST(ModelTest, LatencyContract) {
  for (Variant v : {Variant::kMI, Variant::kL, Variant::kO}) {
    ModelConfig c = DeskConfig(v);
    const TasNet net(c, 10);
    for (std::size_t t : {1500u, 1509u}) {
      const long first = FirstChange(net, 3000, t);
      EXPECT_GE(first, static_cast<long>(t) - 240) << VariantName(v);
      EXPECT_EQ(first, static_cast<long>(t - t % 10) - 200) << VariantName(v);
    }
    c.lookahead_frames = 0;
    const TasNet causal(c, 10);
    EXPECT_EQ(FirstChange(causal, 3000, 1509), 1509 - 39) << VariantName(v);
  }
}

TEST(ModelTest, RejectsBadInputs) {
  const TasNet net(DeskConfig(), 11);
  Graph g;
  EXPECT_THROW(net.Forward(g, std::vector<double>(100, 0.1), std::vector<double>(99, 0.1)),
               Error);
  EXPECT_THROW(net.Forward(g, std::vector<double>{}, std::vector<double>{}), Error);
  ModelConfig c = DeskConfig();
  c.lookahead_frames = 1000;
  EXPECT_THROW(TasNet{c}, Error);
}

TEST(ModelTest, FullModelGradientCheck) {
  for (Variant v : {Variant::kMI, Variant::kL, Variant::kO}) {
    TasNet net(GradCheckConfig(v), 12);
    EXPECT_LE(net.params().NumScalars(), 50000u);
    Rng rng(6);
    const auto s = RandomSignal(rng, 64);
    auto a = s, b = RandomSignal(rng, 64);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += 0.5 * b[i];
    const metrics::LossConfig cfg;
    const auto r = testing::CheckParamGradients(
        net.params(), [&] { return train::ItemLoss(net, a, b, s, cfg, 0.0); },
        [&] {
          net.params().ZeroGrad();
          train::ItemLoss(net, a, b, s, cfg, 1.0);
        });
    EXPECT_TRUE(r.ok) << VariantName(v) << " worst " << r.worst_rel << " at " << r.worst;
  }
}

}  // namespace
}  // namespace tasres::model
