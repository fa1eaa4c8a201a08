// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/scenario.h"

#include <cmath>

#include "tasres/audio/fft.h"
#include "tasres/echo/nonlinearity.h"
#include "tasres/error.h"

namespace tasres::echo {

Waveform MakeEcho(const Waveform& x, std::span<const double> rir,
                  double clip_ratio) {
  Require(!rir.empty(), "echo path impulse response is empty");
  const Waveform driven = LoudspeakerNl(SoftClip(x, clip_ratio));
  std::vector<double> full = FftConvolve(driven.samples, rir);
  full.resize(x.size());
  return Waveform(std::move(full), x.sample_rate);
}

std::vector<double> NaiveConvolveTruncated(std::span<const double> x,
                                           std::span<const double> h) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    const std::size_t taps = std::min(h.size(), n + 1);
    for (std::size_t k = 0; k < taps; ++k) acc += h[k] * x[n - k];
    out[n] = acc;
  }
  return out;
}

double PowerRatioDb(std::span<const double> a, std::span<const double> b) {
  return 10.0 * std::log10(Energy(a) / Energy(b));
}

ScenarioItem Mix(const std::optional<Waveform>& s, const Waveform& d,
                 const MixSpec& mix, Rng& rng) {
  const std::size_t n = d.size();
  ScenarioItem item;
  item.mix = mix;
  item.has_near_end = s.has_value();
  item.s = s ? *s : Waveform(n, d.sample_rate);
  Require(item.s.size() == n, "near-end and echo lengths differ");
  Require(item.s.sample_rate == d.sample_rate, "near-end and echo rates differ");

  const double ed = Energy(d.samples);
  double gain = 1.0;
  if (s) {
    const double es = Energy(s->samples);
    if (ed == 0.0) Fail(ErrorCode::kInvalidArgument, "echo is all-zero; SER undefined");
    Require(es > 0.0, "near-end signal is all-zero; SER undefined");
    gain = std::sqrt(es / (ed * std::pow(10.0, mix.ser_db / 10.0)));
  }
  item.echo_gain = gain;
  item.d = Waveform(n, d.sample_rate);
  for (std::size_t i = 0; i < n; ++i) item.d[i] = gain * d[i];

  item.v = Waveform(n, d.sample_rate);
  double signal_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sig = item.s[i] + item.d[i];
    signal_energy += sig * sig;
  }
  if (n > 0 && signal_energy > 0.0) {
    for (auto& sample : item.v.samples) sample = rng.Normal();
    const double scale =
        std::sqrt(signal_energy / (Energy(item.v.samples) * std::pow(10.0, mix.snr_db / 10.0)));
    for (auto& sample : item.v.samples) sample *= scale;
  }
  item.y = Waveform(n, d.sample_rate);
  for (std::size_t i = 0; i < n; ++i) item.y[i] = item.s[i] + item.d[i] + item.v[i];
  return item;
}

}  // namespace tasres::echo
