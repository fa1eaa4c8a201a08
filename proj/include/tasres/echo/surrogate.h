// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_SURROGATE_H_
#define TASRES_ECHO_SURROGATE_H_

#include <cstddef>

#include "tasres/audio/rng.h"
#include "tasres/audio/waveform.h"

namespace tasres::echo {

// Synthetic stand-ins for speech and music corpora, so the whole pipeline
// runs without external data. Both are normalized to `rms` and peak < 1.

// Syllable-like bursts: a glottal pulse train plus breath noise through two
// formant resonators under a raised-cosine envelope, separated by pauses.
Waveform SpeechSurrogate(std::size_t n, Rng& rng, int sample_rate = kDefaultSampleRate,
                         double rms = 0.1);

// Overlapping harmonic notes with exponential decay.
Waveform MusicSurrogate(std::size_t n, Rng& rng, int sample_rate = kDefaultSampleRate,
                        double rms = 0.1);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_SURROGATE_H_
