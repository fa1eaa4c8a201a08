// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/nonlinearity.h"

#include <algorithm>
#include <cmath>

#include "tasres/error.h"

namespace tasres::echo {

double SoftClipSample(double x, double x_max) {
  if (x_max == 0.0) return 0.0;
  return x_max * x / std::sqrt(x_max * x_max + x * x);
}

Waveform SoftClip(const Waveform& x, double ratio) {
  Require(ratio > 0.0 && ratio <= 1.0, "soft clip ratio must be in (0, 1]");
  const double x_max = ratio * MaxAbs(x.samples);
  Waveform out(x.size(), x.sample_rate);
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = SoftClipSample(x[n], x_max);
  return out;
}

double LoudspeakerNlSample(double x) {
  const double b = 1.5 * x - 0.3 * x * x;
  const double a = b > 0.0 ? 4.0 : 2.0;
  // 1 / (1 + e^{-ab}) - 1/2 written as a tanh; saturated values are rounded
  // inward so the open range (-1/2, 1/2) survives floating point.
  static const double edge = std::nextafter(0.5, 0.0);
  return std::clamp(0.5 * std::tanh(0.5 * a * b), -edge, edge);
}

Waveform LoudspeakerNl(const Waveform& x) {
  Waveform out(x.size(), x.sample_rate);
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = LoudspeakerNlSample(x[n]);
  return out;
}

}  // namespace tasres::echo
