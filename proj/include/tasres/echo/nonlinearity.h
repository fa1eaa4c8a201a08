// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_NONLINEARITY_H_
#define TASRES_ECHO_NONLINEARITY_H_

#include "tasres/audio/waveform.h"

namespace tasres::echo {

inline constexpr double kDefaultClipRatio = 0.8;

// out = x_max * x / sqrt(x_max^2 + x^2), x_max = ratio * max|x|.
// An all-zero input returns zeros.
Waveform SoftClip(const Waveform& x, double ratio = kDefaultClipRatio);
double SoftClipSample(double x, double x_max);

// Sigmoidal loudspeaker model: b = 1.5x - 0.3x^2, a = 4 for b > 0 and 2
// otherwise, out = 1 / (1 + exp(-a b)) - 1/2. Range (-1/2, 1/2).
Waveform LoudspeakerNl(const Waveform& x);
double LoudspeakerNlSample(double x);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_NONLINEARITY_H_
