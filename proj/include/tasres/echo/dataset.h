// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_DATASET_H_
#define TASRES_ECHO_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tasres/echo/manifest.h"
#include "tasres/echo/rir.h"

namespace tasres::echo {

struct SynthConfig {
  int n_items = 8;
  std::uint64_t seed = 1;
  double item_seconds = 4.0;
  int sample_rate = kDefaultSampleRate;
  std::vector<double> ser_set{-12.2, -14.2, -16.2, -18.2};
  std::vector<double> snr_set{30.0, 20.0};
  double clip_ratio = 0.8;
  double single_talk_fraction = 0.25;
  double music_fraction = 0.5;
  double val_fraction = 0.0;
  // Peak level that y is scaled to stay under (all components share the
  // scale, so SER and SNR are preserved).
  double max_peak = 0.9;
  // Optional corpora of 16-bit mono WAVs. An empty path selects the
  // built-in surrogate generator for that role.
  std::filesystem::path far_speech_dir;
  std::filesystem::path far_music_dir;
  std::filesystem::path near_dir;
  RoomSampling rooms;
  int jobs = 1;

  void Validate() const;
};

// Synthesizes one item deterministically from (config.seed, index).
ScenarioItem SynthesizeItem(const SynthConfig& config, std::size_t index);

// Writes <out_dir>/<id>/{x,s,d,v,y}.wav and <out_dir>/manifest.jsonl.
Manifest SynthDataset(const SynthConfig& config, const std::filesystem::path& out_dir);

// Sorted list of *.wav files under dir (non-recursive). Throws kEmptyInput
// when the directory holds none.
std::vector<std::filesystem::path> ListCorpus(const std::filesystem::path& dir);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_DATASET_H_
