// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_AUDIO_WAVEFORM_H_
#define TASRES_AUDIO_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tasres {

inline constexpr int kDefaultSampleRate = 16000;

// Mono signal in normalized amplitude (nominally [-1, 1]).
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  Waveform() = default;
  explicit Waveform(std::size_t n, int rate = kDefaultSampleRate)
      : samples(n, 0.0), sample_rate(rate) {}
  Waveform(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double& operator[](std::size_t i) { return samples[i]; }
  double operator[](std::size_t i) const { return samples[i]; }
  std::span<const double> view() const { return samples; }
};

bool AllFinite(std::span<const double> x);
double Energy(std::span<const double> x);
double MaxAbs(std::span<const double> x);

}  // namespace tasres

#endif  // TASRES_AUDIO_WAVEFORM_H_
