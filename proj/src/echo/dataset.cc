// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/dataset.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "tasres/audio/wav_io.h"
#include "tasres/echo/surrogate.h"
#include "tasres/error.h"
#include "tasres/parallel.h"

namespace tasres::echo {
namespace {

std::string ItemId(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "item_%05zu", index);
  return buf;
}

// Random segment of n samples from a corpus file; shorter files are padded
// with zeros at the end.
Waveform CorpusSegment(const std::vector<std::filesystem::path>& files,
                       std::size_t n, int rate, Rng& rng) {
  const auto& path = files[rng.UniformInt(files.size())];
  Waveform w = ReadWav(path);
  if (w.sample_rate != rate)
    Fail(ErrorCode::kUnsupportedFormat,
         "sample rate " + std::to_string(w.sample_rate) + " != " +
             std::to_string(rate) + " in " + path.string());
  Waveform out(n, rate);
  const std::size_t start = w.size() > n ? rng.UniformInt(w.size() - n + 1) : 0;
  for (std::size_t i = 0; i < n && start + i < w.size(); ++i) out[i] = w[start + i];
  return out;
}

struct Corpora {
  std::vector<std::filesystem::path> far_speech, far_music, near;
};

Corpora ListAll(const SynthConfig& c) {
  Corpora corpora;
  if (!c.far_speech_dir.empty()) corpora.far_speech = ListCorpus(c.far_speech_dir);
  if (!c.far_music_dir.empty()) corpora.far_music = ListCorpus(c.far_music_dir);
  if (!c.near_dir.empty()) corpora.near = ListCorpus(c.near_dir);
  return corpora;
}

ScenarioItem Synthesize(const SynthConfig& c, const Corpora& corpora, std::size_t index) {
  Rng rng = Rng::ForStream(c.seed, index);
  const auto n = static_cast<std::size_t>(std::llround(c.item_seconds * c.sample_rate));
  const bool music = rng.Uniform() < c.music_fraction;
  const bool single = rng.Uniform() < c.single_talk_fraction;
  MixSpec mix;
  mix.seed = rng.seed();
  mix.ser_db = c.ser_set[rng.UniformInt(c.ser_set.size())];
  mix.snr_db = c.snr_set[rng.UniformInt(c.snr_set.size())];

  Waveform x;
  const auto& far_files = music ? corpora.far_music : corpora.far_speech;
  if (!far_files.empty()) {
    x = CorpusSegment(far_files, n, c.sample_rate, rng);
  } else {
    x = music ? MusicSurrogate(n, rng, c.sample_rate) : SpeechSurrogate(n, rng, c.sample_rate);
  }
  std::optional<Waveform> s;
  if (!single) {
    s = corpora.near.empty() ? SpeechSurrogate(n, rng, c.sample_rate)
                             : CorpusSegment(corpora.near, n, c.sample_rate, rng);
  }
  RoomSpec room = SampleRoom(rng, c.rooms, c.sample_rate);
  room.rir_len = room.EffectiveLength();
  const std::vector<double> rir = SimulateRir(room);
  const Waveform d = MakeEcho(x, rir, c.clip_ratio);

  ScenarioItem item = Mix(s, d, mix, rng);
  const double peak = MaxAbs(item.y.samples);
  if (peak > c.max_peak) {
    const double scale = c.max_peak / peak;
    for (Waveform* w : {&item.s, &item.d, &item.v})
      for (auto& v : w->samples) v *= scale;
    for (std::size_t i = 0; i < n; ++i) item.y[i] = item.s[i] + item.d[i] + item.v[i];
    item.echo_gain *= scale;
  }
  item.x = std::move(x);
  item.id = ItemId(index);
  item.far_type = music ? "music" : "speech";
  item.room = room;
  const auto n_val = static_cast<std::size_t>(std::llround(c.val_fraction * c.n_items));
  item.split = index + n_val >= static_cast<std::size_t>(c.n_items) ? "val" : "train";
  return item;
}

}  // namespace

void SynthConfig::Validate() const {
  Require(n_items > 0, "n_items must be positive");
  Require(item_seconds > 0.0, "item_seconds must be positive");
  Require(sample_rate > 0, "sample_rate must be positive");
  Require(!ser_set.empty() && !snr_set.empty(), "SER and SNR sets must be non-empty");
  Require(clip_ratio > 0.0 && clip_ratio <= 1.0, "clip_ratio must be in (0, 1]");
  Require(single_talk_fraction >= 0.0 && single_talk_fraction <= 1.0,
          "single_talk_fraction must be in [0, 1]");
  Require(music_fraction >= 0.0 && music_fraction <= 1.0, "music_fraction must be in [0, 1]");
  Require(val_fraction >= 0.0 && val_fraction < 1.0, "val_fraction must be in [0, 1)");
  Require(max_peak > 0.0 && max_peak < 1.0, "max_peak must be in (0, 1)");
}

std::vector<std::filesystem::path> ListCorpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    Fail(ErrorCode::kIo, "corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) Fail(ErrorCode::kEmptyInput, "empty corpus: " + dir.string());
  return files;
}

ScenarioItem SynthesizeItem(const SynthConfig& config, std::size_t index) {
  config.Validate();
  return Synthesize(config, ListAll(config), index);
}

Manifest SynthDataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
  config.Validate();
  const Corpora corpora = ListAll(config);
  std::filesystem::create_directories(out_dir);
  Manifest manifest(out_dir);
  const auto n = static_cast<std::size_t>(config.n_items);
  manifest.items().resize(n);
  ParallelFor(n, config.jobs, [&](std::size_t i) {
    const ScenarioItem item = Synthesize(config, corpora, i);
    ItemRecord& r = manifest.items()[i];
    r.id = item.id;
    r.split = item.split;
    r.talk = item.has_near_end ? "double" : "single";
    r.far_type = item.far_type;
    r.seed = item.mix.seed;
    if (item.has_near_end) r.ser_db = item.mix.ser_db;
    r.snr_db = item.mix.snr_db;
    r.echo_gain = item.echo_gain;
    r.room = item.room;
    manifest.StoreSignals(i, item, {"x", "s", "d", "v", "y"});
  });
  manifest.Save(out_dir / "manifest.jsonl");
  return manifest;
}

}  // namespace tasres::echo
