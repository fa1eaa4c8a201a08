// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/surrogate.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace tasres::echo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Two-pole resonator with unit peak gain (approximately).
class Resonator {
 public:
  Resonator(double freq, double bandwidth, int rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth / rate);
    a1_ = 2.0 * r * std::cos(kTwoPi * freq / rate);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double Process(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_, a2_, gain_;
  double y1_ = 0.0, y2_ = 0.0;
};

void Normalize(Waveform& w, double rms) {
  const double energy = Energy(w.samples);
  if (energy <= 0.0) return;
  double scale = rms / std::sqrt(energy / static_cast<double>(w.size()));
  const double peak = MaxAbs(w.samples) * scale;
  if (peak > 0.99) scale *= 0.99 / peak;
  for (auto& v : w.samples) v *= scale;
}

}  // namespace

Waveform SpeechSurrogate(std::size_t n, Rng& rng, int sample_rate, double rms) {
  Waveform w(n, sample_rate);
  std::size_t pos = static_cast<std::size_t>(rng.Uniform(0.0, 0.2) * sample_rate);
  while (pos < n) {
    const auto len = static_cast<std::size_t>(rng.Uniform(0.12, 0.32) * sample_rate);
    const double f0 = rng.Uniform(90.0, 230.0);
    const double glide = rng.Uniform(-0.25, 0.25);
    const double level = rng.Uniform(0.4, 1.0);
    const double voicing = rng.Uniform(0.6, 1.0);
    Resonator f1(rng.Uniform(300.0, 900.0), 90.0, sample_rate);
    Resonator f2(rng.Uniform(900.0, 2500.0), 130.0, sample_rate);
    Resonator f3(rng.Uniform(2400.0, 3600.0), 200.0, sample_rate);
    double phase = rng.Uniform();
    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(len);
      const double pitch = f0 * (1.0 + glide * t);
      phase += pitch / sample_rate;
      double excitation = 0.0;
      if (phase >= 1.0) {
        phase -= std::floor(phase);
        excitation = voicing * 8.0;
      }
      excitation += (1.0 - voicing + 0.05) * rng.Normal();
      const double env = 0.5 - 0.5 * std::cos(kTwoPi * t);
      const double sample =
          f1.Process(excitation) + 0.6 * f2.Process(excitation) + 0.2 * f3.Process(excitation);
      w[pos + i] = level * env * sample;
    }
    pos += len;
    // Short gaps inside words, longer pauses between phrases.
    const double gap = rng.Uniform() < 0.2 ? rng.Uniform(0.2, 0.5) : rng.Uniform(0.02, 0.1);
    pos += static_cast<std::size_t>(gap * sample_rate);
  }
  Normalize(w, rms);
  return w;
}

Waveform MusicSurrogate(std::size_t n, Rng& rng, int sample_rate, double rms) {
  Waveform w(n, sample_rate);
  std::size_t pos = 0;
  while (pos < n) {
    const auto step = static_cast<std::size_t>(rng.Uniform(0.12, 0.5) * sample_rate);
    const int voices = 1 + static_cast<int>(rng.UniformInt(3));
    for (int v = 0; v < voices; ++v) {
      const double midi = 45.0 + static_cast<double>(rng.UniformInt(40));
      const double f0 = 440.0 * std::pow(2.0, (midi - 69.0) / 12.0);
      const double decay = rng.Uniform(2.0, 8.0);
      const auto len = static_cast<std::size_t>(rng.Uniform(0.3, 1.2) * sample_rate);
      const double level = rng.Uniform(0.3, 1.0);
      std::array<double, 6> amps;
      for (std::size_t h = 0; h < amps.size(); ++h)
        amps[h] = rng.Uniform(0.2, 1.0) / static_cast<double>(h + 1);
      const double phase0 = rng.Uniform();
      for (std::size_t i = 0; i < len && pos + i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double attack = std::min(1.0, t / 0.01);
        const double env = level * attack * std::exp(-decay * t);
        double sample = 0.0;
        for (std::size_t h = 0; h < amps.size(); ++h) {
          const double f = f0 * static_cast<double>(h + 1);
          if (f >= 0.45 * sample_rate) break;
          sample += amps[h] * std::sin(kTwoPi * (f * t + phase0 * static_cast<double>(h + 1)));
        }
        w[pos + i] += env * sample;
      }
    }
    pos += step;
  }
  for (auto& v : w.samples) v += 0.002 * rng.Normal();
  Normalize(w, rms);
  return w;
}

}  // namespace tasres::echo
