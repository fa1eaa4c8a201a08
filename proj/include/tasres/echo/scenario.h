// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_SCENARIO_H_
#define TASRES_ECHO_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tasres/audio/rng.h"
#include "tasres/audio/waveform.h"
#include "tasres/echo/rir.h"

namespace tasres::echo {

struct MixSpec {
  double ser_db = -14.2;
  double snr_db = 30.0;
  std::uint64_t seed = 0;
};

// One utterance worth of signals. In single-talk items `s` is all zeros and
// has_near_end is false.
struct ScenarioItem {
  std::string id;
  std::string split = "train";
  std::string far_type = "speech";
  bool has_near_end = true;
  Waveform x, s, d, v, y;
  Waveform s_aec, d_hat;
  double echo_gain = 1.0;
  MixSpec mix;
  RoomSpec room;

  bool has_laec = false;
};

// d = rir * LoudspeakerNl(SoftClip(x, clip_ratio)), truncated to len(x).
Waveform MakeEcho(const Waveform& x, std::span<const double> rir,
                  double clip_ratio = 0.8);

// Direct O(N L) convolution truncated to x.size(); the reference for the
// FFT path.
std::vector<double> NaiveConvolveTruncated(std::span<const double> x,
                                           std::span<const double> h);

// Scales d to the requested SER and adds white Gaussian noise at the
// requested SNR (relative to s + g d). Without s the echo gain is 1 and the
// SNR is relative to d. Fills s, d, v, y, echo_gain and mix; y = s + d + v
// exactly.
ScenarioItem Mix(const std::optional<Waveform>& s, const Waveform& d,
                 const MixSpec& mix, Rng& rng);

// 10 log10(|a|^2 / |b|^2).
double PowerRatioDb(std::span<const double> a, std::span<const double> b);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_SCENARIO_H_
