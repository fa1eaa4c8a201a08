// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "common/fixtures.h"
#include "tasres/audio/fft.h"
#include "tasres/audio/framing.h"
#include "tasres/audio/rng.h"
#include "tasres/audio/wav_io.h"
#include "tasres/error.h"

namespace tasres {
namespace {

namespace fs = std::filesystem;

class WavTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tasres_wav_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

void WriteLe(std::ofstream& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void WriteRawWav(const fs::path& path, int channels, int bits, int format = 1) {
  std::ofstream out(path, std::ios::binary);
  const std::uint32_t data_bytes = 16 * channels * bits / 8;
  out.write("RIFF", 4);
  WriteLe(out, 36 + data_bytes, 4);
  out.write("WAVEfmt ", 8);
  WriteLe(out, 16, 4);
  WriteLe(out, format, 2);
  WriteLe(out, channels, 2);
  WriteLe(out, 16000, 4);
  WriteLe(out, 16000 * channels * bits / 8, 4);
  WriteLe(out, channels * bits / 8, 2);
  WriteLe(out, bits, 2);
  out.write("data", 4);
  WriteLe(out, data_bytes, 4);
  for (std::uint32_t i = 0; i < data_bytes; ++i) out.put(0);
}

TEST_F(WavTest, ZerosRoundTripExactly) {
  WriteWav(dir_ / "z.wav", Waveform(16000));
  const Waveform back = ReadWav(dir_ / "z.wav");
  EXPECT_EQ(back.size(), 16000u);
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_EQ(MaxAbs(back.samples), 0.0);
}

TEST_F(WavTest, RoundTripWithinQuantization) {
  Waveform sine(16000);
  for (std::size_t i = 0; i < sine.size(); ++i)
    sine[i] = std::sin(2 * std::numbers::pi * 440 * i / 16000.0);
  WriteWav(dir_ / "s.wav", sine);
  const Waveform back = ReadWav(dir_ / "s.wav");
  ASSERT_EQ(back.size(), sine.size());
  double err = 0.0;
  for (std::size_t i = 0; i < sine.size(); ++i) err = std::max(err, std::abs(back[i] - sine[i]));
  EXPECT_LE(err, std::ldexp(1.0, -15));

  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Waveform w(3000);
    for (double& v : w.samples) v = rng.Uniform(-1.0, 1.0 - std::ldexp(1.0, -15));
    WriteWav(dir_ / "r.wav", w);
    const Waveform r = ReadWav(dir_ / "r.wav");
    for (std::size_t i = 0; i < w.size(); ++i) ASSERT_LE(std::abs(r[i] - w[i]), std::ldexp(1.0, -15));
  }
}

TEST_F(WavTest, DistinctErrors) {
  WriteRawWav(dir_ / "stereo.wav", 2, 16);
  WriteRawWav(dir_ / "float.wav", 1, 32, 3);
  std::ofstream(dir_ / "junk.wav") << "not a wav file at all";
  auto code_of = [](const fs::path& p) {
    try {
      ReadWav(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code_of(dir_ / "stereo.wav"), ErrorCode::kChannelCount);
  EXPECT_EQ(code_of(dir_ / "float.wav"), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(code_of(dir_ / "junk.wav"), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(code_of(dir_ / "missing.wav"), ErrorCode::kIo);
  Waveform bad(4);
  bad[2] = std::nan("");
  EXPECT_THROW(WriteWav(dir_ / "nan.wav", bad), Error);
}

TEST(FramingTest, Counts) {
  const FrameSpec spec{40, 10};
  EXPECT_EQ(FrameCount(40, spec), 1u);
  EXPECT_EQ(FrameCount(64000, spec), 6397u);
  EXPECT_EQ(FrameCount(39, spec), 0u);
  EXPECT_EQ(PaddedFrameCount(64000, spec), 6400u);
  std::size_t prev = 0;
  for (std::size_t n = 0; n < 300; ++n) {
    EXPECT_GE(FrameCount(n, spec), prev);
    prev = FrameCount(n, spec);
  }
  EXPECT_THROW((FrameSpec{40, 0}.Validate()), Error);
}

TEST(FramingTest, OverlapAddIsAdjointOfFraming) {
  Rng rng(3);
  const FrameSpec spec{8, 2};
  const auto x = testing::RandomSignal(rng, 37, 1.0);
  const auto frames = FrameSignal(x, spec);
  const std::size_t k = PaddedFrameCount(x.size(), spec);
  ASSERT_EQ(frames.size(), k * 8);
  const auto f = testing::RandomSignal(rng, frames.size(), 1.0);
  const auto back = OverlapAdd(f, k, x.size(), spec);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) lhs += frames[i] * f[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * back[i];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(RngTest, Reproducible) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000000; ++i) {
    const auto va = a.NextU64();
    ASSERT_EQ(va, b.NextU64());
    differs |= va != c.NextU64();
  }
  EXPECT_TRUE(differs);
  Rng s1 = Rng::ForStream(7, 3), s2 = Rng::ForStream(7, 3), s3 = Rng::ForStream(7, 4);
  EXPECT_EQ(s1.NextU64(), s2.NextU64());
  EXPECT_NE(s1.NextU64(), s3.NextU64());
}

TEST(RngTest, Distributions) {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double g = rng.Normal();
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.UniformInt(7), 7u);
}

TEST(FftTest, ConvolutionMatchesNaive) {
  Rng rng(8);
  const auto a = testing::RandomSignal(rng, 1000, 1.0);
  const auto b = testing::RandomSignal(rng, 77, 1.0);
  const auto fast = FftConvolve(a, b);
  ASSERT_EQ(fast.size(), a.size() + b.size() - 1);
  double err = 0.0;
  for (std::size_t n = 0; n < fast.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (n >= k && n - k < a.size()) acc += a[n - k] * b[k];
    err = std::max(err, std::abs(acc - fast[n]));
  }
  EXPECT_LT(err, 1e-9);
}

TEST(FftTest, RoundTrip) {
  Rng rng(1);
  RealFft fft(64);
  const auto x = testing::RandomSignal(rng, 64, 1.0);
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> back(64);
  fft.Forward(x, spec);
  fft.Inverse(spec, back);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
}

}  // namespace
}  // namespace tasres
