// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "common/fixtures.h"
#include "tasres/audio/fft.h"
#include "tasres/audio/wav_io.h"
#include "tasres/echo/dataset.h"
#include "tasres/echo/manifest.h"
#include "tasres/echo/nonlinearity.h"
#include "tasres/echo/rir.h"
#include "tasres/echo/scenario.h"
#include "tasres/error.h"

namespace tasres::echo {
namespace {

namespace fs = std::filesystem;

// Schroeder backward integration, T20 fit (-5 to -25 dB) extrapolated to 60 dB.
double SchroederT60(const std::vector<double>& h, int fs) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  std::vector<double> t, db;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double level = 10.0 * std::log10(edc[i] / edc[0]);
    if (level <= -5.0 && level >= -25.0) {
      t.push_back(static_cast<double>(i) / fs);
      db.push_back(level);
    }
  }
  const double n = static_cast<double>(t.size());
  double st = 0, sd = 0, stt = 0, std_ = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sd += db[i];
    stt += t[i] * t[i];
    std_ += t[i] * db[i];
  }
  const double slope = (n * std_ - st * sd) / (n * stt - st * st);
  return -60.0 / slope;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(NonlinearityTest, SoftClipValues) {
  EXPECT_EQ(SoftClipSample(0.0, 0.8), 0.0);
  EXPECT_NEAR(SoftClipSample(0.8, 0.8), 0.8 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(SoftClipSample(10.0, 0.8), 8.0 / std::sqrt(100.64), 1e-15);
  EXPECT_NEAR(SoftClipSample(10.0, 0.8), 0.79745, 1e-5);
  Waveform w(3);
  w[0] = 0.5;
  w[1] = -1.0;
  w[2] = 0.8;
  const Waveform out = SoftClip(w, 0.8);
  EXPECT_NEAR(out[2], 0.8 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(MaxAbs(SoftClip(Waveform(10), 0.8).samples), 0.0);
  EXPECT_THROW(SoftClip(w, 0.0), Error);
  EXPECT_THROW(SoftClip(w, 1.5), Error);
}

TEST(NonlinearityTest, SoftClipOddMonotoneBounded) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.Uniform(-50, 50), b = rng.Uniform(-50, 50);
    EXPECT_EQ(SoftClipSample(-a, 0.7), -SoftClipSample(a, 0.7));
    if (a < b) {
      EXPECT_LT(SoftClipSample(a, 0.7), SoftClipSample(b, 0.7));
    }
    EXPECT_LT(std::abs(SoftClipSample(a, 0.7)), 0.7);
  }
}

TEST(NonlinearityTest, LoudspeakerValues) {
  EXPECT_EQ(LoudspeakerNlSample(0.0), 0.0);
  EXPECT_NEAR(LoudspeakerNlSample(1.0), 1.0 / (1.0 + std::exp(-4.8)) - 0.5, 1e-15);
  EXPECT_NEAR(LoudspeakerNlSample(1.0), 0.49184, 1e-5);
  EXPECT_NEAR(LoudspeakerNlSample(-1.0), -0.47340, 1e-5);
  // b = 0 away from x = 0 takes the a = 2 branch: x = 5 gives b = 0 as well.
  EXPECT_NEAR(LoudspeakerNlSample(5.0), 0.0, 1e-15);
}

TEST(RirTest, SchroederDecayMatchesT60) {
  RoomSpec room;
  room.dimensions = {4.0, 4.0, 3.0};
  room.t60 = 0.3;
  const auto h = SimulateRir(room);
  EXPECT_EQ(h.size(), static_cast<std::size_t>(std::ceil(0.3 * 16000)) + 1024);
  const double t60 = SchroederT60(h, 16000);
  EXPECT_GE(t60, 0.225);
  EXPECT_LE(t60, 0.375);
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    total += h[i] * h[i];
    if (i >= static_cast<std::size_t>(2 * 0.3 * 16000)) tail += h[i] * h[i];
  }
  EXPECT_LE(tail, 0.01 * total);
}

TEST(RirTest, AnechoicLimitIsDirectPath) {
  RoomSpec room;
  room.t60 = 0.01;
  room.highpass = false;
  EXPECT_EQ(SabineAbsorption(room), 1.0);
  const auto h = SimulateRir(room);
  const double delay = DirectPathDelaySamples(room);
  const auto peak = std::max_element(h.begin(), h.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }) - h.begin();
  EXPECT_EQ(peak, std::lround(delay));
  double near = 0.0, total = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    total += h[i] * h[i];
    if (std::abs(static_cast<double>(i) - delay) < 64) near += h[i] * h[i];
  }
  EXPECT_GT(near / total, 0.999);
}

TEST(RirTest, RejectsDevicesOutsideRoom) {
  RoomSpec room;
  room.mic = {5.0, 1.0, 1.0};
  EXPECT_THROW(SimulateRir(room), Error);
  room = RoomSpec{};
  room.t60 = 0.0;
  EXPECT_THROW(SimulateRir(room), Error);
}

TEST(RirTest, SampledRoomsAreValid) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const RoomSpec r = SampleRoom(rng);
    EXPECT_NO_THROW(r.Validate());
    EXPECT_GE(r.t60, 0.15);
    EXPECT_LE(r.t60, 0.45);
  }
}

TEST(EchoTest, MakeEchoOracles) {
  Rng rng(4);
  const Waveform x(testing::RandomSignal(rng, 5000, 0.3), 16000);
  EXPECT_EQ(MaxAbs(MakeEcho(Waveform(100), std::vector<double>{0.3, 0.2}).samples), 0.0);

  const Waveform direct = MakeEcho(x, std::vector<double>{1.0});
  const Waveform nl = LoudspeakerNl(SoftClip(x, 0.8));
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(direct[i], nl[i], 1e-12);

  RoomSpec room;
  room.t60 = 0.2;
  const auto rir = SimulateRir(room);
  const Waveform d = MakeEcho(x, rir);
  const auto naive = NaiveConvolveTruncated(nl.samples, rir);
  ASSERT_EQ(d.size(), x.size());
  double err = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - naive[i]));
  EXPECT_LT(err, 1e-9);
}

TEST(MixTest, GainAndLevels) {
  Rng rng(6);
  Waveform s(std::vector<double>{1.0, 0.0}, 16000), d(std::vector<double>{0.0, 1.0}, 16000);
  MixSpec mix{-14.2, 30.0, 0};
  const ScenarioItem a = Mix(s, d, mix, rng);
  EXPECT_NEAR(a.echo_gain, std::sqrt(std::pow(10.0, 1.42)), 1e-12);
  EXPECT_NEAR(a.echo_gain, 5.1286, 1e-4);
  const ScenarioItem b = Mix(s, Waveform(std::vector<double>{1.0, 0.0}, 16000), MixSpec{0.0, 30.0, 0}, rng);
  EXPECT_NEAR(b.echo_gain, 1.0, 1e-15);

  const Waveform ls(testing::RandomSignal(rng, 16000), 16000), ld(testing::RandomSignal(rng, 16000, 0.5), 16000);
  for (double ser : {-12.2, -18.2, 3.0}) {
    const ScenarioItem it = Mix(ls, ld, MixSpec{ser, 20.0, 0}, rng);
    EXPECT_NEAR(PowerRatioDb(it.s.samples, it.d.samples), ser, 1e-9);
    std::vector<double> sd(it.s.samples);
    for (std::size_t i = 0; i < sd.size(); ++i) sd[i] += it.d[i];
    EXPECT_NEAR(PowerRatioDb(sd, it.v.samples), 20.0, 1e-9);
    for (std::size_t i = 0; i < it.y.size(); ++i) ASSERT_EQ(it.y[i], it.s[i] + it.d[i] + it.v[i]);
  }
}

TEST(MixTest, SingleTalkAndErrors) {
  Rng rng(7);
  const Waveform d(testing::RandomSignal(rng, 800), 16000);
  const ScenarioItem it = Mix(std::nullopt, d, MixSpec{}, rng);
  EXPECT_FALSE(it.has_near_end);
  EXPECT_EQ(it.echo_gain, 1.0);
  EXPECT_EQ(MaxAbs(it.s.samples), 0.0);
  for (std::size_t i = 0; i < it.y.size(); ++i) ASSERT_EQ(it.y[i], it.d[i] + it.v[i]);
  EXPECT_THROW(Mix(d, Waveform(800), MixSpec{}, rng), Error);
  EXPECT_THROW(Mix(Waveform(799), d, MixSpec{}, rng), Error);
}

class SynthTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("tasres_synth_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  SynthConfig Small() const {
    SynthConfig c;
    c.n_items = 8;
    c.item_seconds = 0.5;
    c.seed = 7;
    c.val_fraction = 0.25;
    return c;
  }
  fs::path root_;
};

TEST_F(SynthTest, DeterministicTrees) {
  const SynthConfig c = Small();
  SynthDataset(c, root_ / "a");
  SynthConfig c2 = c;
  c2.jobs = 3;
  SynthDataset(c2, root_ / "b");
  std::vector<std::string> names;
  for (const auto& e : fs::recursive_directory_iterator(root_ / "a"))
    if (e.is_regular_file()) names.push_back(fs::relative(e.path(), root_ / "a").string());
  ASSERT_GT(names.size(), 8u);
  for (const auto& n : names) EXPECT_EQ(ReadFile(root_ / "a" / n), ReadFile(root_ / "b" / n)) << n;
}

TEST_F(SynthTest, ManifestContents) {
  const SynthConfig c = Small();
  const Manifest m = SynthDataset(c, root_);
  ASSERT_EQ(m.items().size(), 8u);
  const std::set<double> allowed(c.ser_set.begin(), c.ser_set.end());
  std::set<std::string> ids;
  int val = 0;
  for (std::size_t i = 0; i < m.items().size(); ++i) {
    const ItemRecord& r = m.items()[i];
    ids.insert(r.id);
    val += r.split == "val";
    if (r.double_talk()) {
      ASSERT_TRUE(r.ser_db.has_value());
      EXPECT_TRUE(allowed.count(*r.ser_db)) << *r.ser_db;
    } else {
      EXPECT_FALSE(r.ser_db.has_value());
    }
    const ScenarioItem item = m.LoadItem(i);
    EXPECT_EQ(item.y.size(), 8000u);
    for (std::size_t n = 0; n < item.y.size(); ++n)
      ASSERT_NEAR(item.y[n], item.s[n] + item.d[n] + item.v[n], 3.0 * std::ldexp(1.0, -15) / 2);
  }
  EXPECT_EQ(ids.size(), 8u);
  EXPECT_EQ(val, 2);

  const Manifest back = Manifest::Load(root_ / "manifest.jsonl");
  ASSERT_EQ(back.items().size(), 8u);
  for (std::size_t i = 0; i < 8; ++i)
    EXPECT_EQ(SerializeRecord(back.items()[i]), SerializeRecord(m.items()[i]));
}

TEST_F(SynthTest, CorpusErrors) {
  SynthConfig c = Small();
  c.near_dir = root_ / "missing";
  EXPECT_THROW(SynthDataset(c, root_ / "out"), Error);
  fs::create_directories(root_ / "empty");
  c.near_dir = root_ / "empty";
  try {
    SynthDataset(c, root_ / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  c.n_items = 0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST_F(SynthTest, UsesUserCorpus) {
  fs::create_directories(root_ / "near");
  Rng rng(1);
  WriteWav(root_ / "near" / "a.wav", Waveform(testing::RandomSignal(rng, 20000, 0.2), 16000));
  SynthConfig c = Small();
  c.near_dir = root_ / "near";
  c.n_items = 2;
  c.single_talk_fraction = 0.0;
  const ScenarioItem item = SynthesizeItem(c, 0);
  EXPECT_TRUE(item.has_near_end);
  EXPECT_GT(Energy(item.s.samples), 0.0);
}

}  // namespace
}  // namespace tasres::echo
