// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>

#include "common/fixtures.h"
#include "tasres/audio/fft.h"
#include "tasres/echo/rir.h"
#include "tasres/echo/scenario.h"
#include "tasres/error.h"
#include "tasres/laec/fdkf.h"
#include "tasres/metrics/metrics.h"

namespace tasres::laec {
namespace {

std::vector<double> LinearEcho(const std::vector<double>& x, const std::vector<double>& h) {
  auto y = FftConvolve(x, h);
  y.resize(x.size());
  return y;
}

TEST(FdkfTest, NoExcitationLeavesFilterAlone) {
  FdkfConfig cfg;
  cfg.block_len = 64;
  Fdkf f(cfg);
  Rng rng(1);
  const auto y = testing::RandomSignal(rng, 64);
  std::vector<double> zeros(64, 0.0), s(64), d(64);
  for (int b = 0; b < 4; ++b) {
    f.ProcessBlock(zeros, y, s, d);
    for (int i = 0; i < 64; ++i) {
      ASSERT_EQ(d[i], 0.0);
      ASSERT_EQ(s[i], y[i]);
    }
    for (const auto& w : f.filter()) ASSERT_EQ(std::abs(w), 0.0);
  }
}

TEST(FdkfTest, AdditivityAndEmptyInput) {
  Rng rng(2);
  echo::RoomSpec room;
  room.t60 = 0.2;
  const auto h = echo::SimulateRir(room);
  const Waveform x(testing::RandomSignal(rng, 20000), 16000);
  Waveform y(LinearEcho(x.samples, h), 16000);
  for (double& v : y.samples) v += 0.01 * rng.Normal();
  FdkfConfig cfg;
  cfg.block_len = 256;
  const LaecResult r = RunFdkf(x, y, cfg);
  ASSERT_EQ(r.s_aec.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ASSERT_LT(std::abs(r.s_aec[i] + r.d_hat[i] - y[i]), 1e-12);

  const LaecResult empty = RunFdkf(Waveform(0), Waveform(0));
  EXPECT_TRUE(empty.s_aec.empty());
  EXPECT_TRUE(empty.d_hat.empty());
  EXPECT_THROW(RunFdkf(Waveform(10), Waveform(11)), Error);
}

TEST(FdkfTest, PlantedEchoCancelsExactly) {
  // y = d_hat means the filter output equals the microphone, so the residual
  // must vanish. Plant it by feeding the filter's own output back as y.
  Rng rng(3);
  const Waveform x(testing::RandomSignal(rng, 4096), 16000);
  FdkfConfig cfg;
  cfg.block_len = 128;
  const LaecResult first = RunFdkf(x, Waveform(4096), cfg);
  const LaecResult r = RunFdkf(x, first.d_hat, cfg);
  EXPECT_EQ(MaxAbs(first.d_hat.samples), 0.0);
  EXPECT_EQ(MaxAbs(r.s_aec.samples), 0.0);
}

TEST(FdkfTest, ConvergesOnLinearEcho) {
  Rng rng(4);
  echo::RoomSpec room;
  room.t60 = 0.15;
  room.rir_len = 512;
  const auto h = echo::SimulateRir(room);
  const std::size_t n = 16000 * 6;
  const Waveform x(testing::RandomSignal(rng, n), 16000);
  Waveform y(LinearEcho(x.samples, h), 16000);
  double energy = 0.0;
  for (double v : y.samples) energy += v * v;
  const double noise = std::sqrt(energy / n * 1e-4);
  for (double& v : y.samples) v += noise * rng.Normal();
  FdkfConfig cfg;
  cfg.block_len = 1024;
  Fdkf f(cfg);
  std::vector<double> s(n), d(n);
  for (std::size_t b = 0; b + 1024 <= n; b += 1024) {
    f.ProcessBlock(std::span(x.samples).subspan(b, 1024), std::span(y.samples).subspan(b, 1024),
                   std::span(s).subspan(b, 1024), std::span(d).subspan(b, 1024));
    for (double p : f.state_variance()) ASSERT_GE(p, 0.0);
    for (double p : f.noise_psd()) ASSERT_GE(p, 0.0);
  }
  EXPECT_GE(metrics::Erle(y.samples, s, 16000, 4.0), 20.0);

  // ERLE over 1 s windows after the first 2 s: nondecreasing trend, one dip
  // allowed. The 0.5 dB slack absorbs fluctuation at the noise floor.
  int violations = 0;
  double prev = -1e9;
  for (int sec = 2; sec < 6; ++sec) {
    double ey = 0, es = 0;
    for (int i = sec * 16000; i < (sec + 1) * 16000; ++i) {
      ey += y[i] * y[i];
      es += s[i] * s[i];
    }
    const double erle = 10 * std::log10(ey / es);
    if (erle < prev - 0.5) ++violations;
    prev = erle;
  }
  EXPECT_LE(violations, 1);

  const auto w = f.ImpulseResponse();
  ASSERT_EQ(w.size(), 1024u);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    err += (w[i] - h[i]) * (w[i] - h[i]);
    ref += h[i] * h[i];
  }
  EXPECT_LT(err / ref, 0.05);
}

TEST(FdkfTest, RunLaecFillsItem) {
  Rng rng(5);
  echo::ScenarioItem item;
  item.x = Waveform(testing::RandomSignal(rng, 3000), 16000);
  item.y = Waveform(testing::RandomSignal(rng, 3000), 16000);
  FdkfConfig cfg;
  cfg.block_len = 256;
  RunLaec(item, cfg);
  EXPECT_TRUE(item.has_laec);
  ASSERT_EQ(item.s_aec.size(), 3000u);
  for (std::size_t i = 0; i < 3000; ++i) ASSERT_LT(std::abs(item.s_aec[i] + item.d_hat[i] - item.y[i]), 1e-12);
}

TEST(FdkfTest, ConfigValidation) {
  FdkfConfig c;
  c.transition = 1.0;
  EXPECT_THROW(c.Validate(), Error);
  c = FdkfConfig{};
  c.block_len = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = FdkfConfig{};
  c.psi_smoothing = -0.1;
  EXPECT_THROW(c.Validate(), Error);
}

}  // namespace
}  // namespace tasres::laec
