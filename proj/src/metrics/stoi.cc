// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// STOI (Taal et al. 2011): 10 kHz, 256-sample Hann frames with 50% overlap,
// 512-point FFT, 15 one-third-octave bands from 150 Hz, 30-frame segments,
// clipping at -15 dB SDR, silent frames below 40 dB dynamic range removed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "tasres/audio/fft.h"
#include "tasres/error.h"
#include "tasres/metrics/metrics.h"

namespace tasres::metrics {
namespace {

constexpr int kFs = 10000;
constexpr int kFrame = 256;
constexpr int kFft = 512;
constexpr int kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegment = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Polyphase rational resampler with the Octave-compatible anti-aliasing
// filter used by the common STOI implementations: Kaiser-windowed sinc with
// 60 dB rejection and a roll-off of a tenth of the cutoff, normalized to
// unit DC gain before the upsampling gain.
std::vector<double> Resample(std::span<const double> x, int up, int down) {
  if (up == down) return {x.begin(), x.end()};
  const double cutoff = 1.0 / (2.0 * std::max(up, down));
  const double rejection_db = 60.0;
  const int half = static_cast<int>(std::ceil((rejection_db - 8.0) / (28.714 * cutoff / 10.0)));
  const int taps = 2 * half + 1;
  const double beta = 0.1102 * (rejection_db - 8.7);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const double t = i - half;
    const double arg = std::numbers::pi * 2.0 * cutoff * t;
    const double sinc = t == 0 ? 1.0 : std::sin(arg) / arg;
    const double r = 2.0 * i / (taps - 1) - 1.0;
    const double win = BesselI0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / BesselI0(beta);
    h[i] = win * sinc;
    sum += h[i];
  }
  for (double& v : h) v *= up / sum;
  const std::size_t n_out = (x.size() * up + down - 1) / down;
  std::vector<double> y(n_out, 0.0);
  const long long n_in = static_cast<long long>(x.size());
  for (std::size_t m = 0; m < n_out; ++m) {
    // Position in the upsampled stream, delayed by the filter's half length.
    const long long t = static_cast<long long>(m) * down + half;
    long long j_hi = std::min<long long>(t / up, n_in - 1);
    long long j_lo = std::max<long long>(0, (t - taps + up) / up);
    double acc = 0.0;
    for (long long j = j_lo; j <= j_hi; ++j) {
      const long long k = t - j * up;
      if (k >= 0 && k < taps) acc += x[j] * h[k];
    }
    y[m] = acc;
  }
  return y;
}

// Symmetric Hann without its zero end points.
std::vector<double> Window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
  return w;
}

void RemoveSilentFrames(std::vector<double>& x, std::vector<double>& y) {
  const std::vector<double> w = Window(kFrame);
  const int hop = kFrame / 2;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kFrame < x.size(); i += hop) starts.push_back(i);
  std::vector<double> energy(starts.size());
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (int i = 0; i < kFrame; ++i) e += std::pow(w[i] * x[starts[f] + i], 2);
    energy[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
  }
  const double top = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (top - kDynRange - energy[f] < 0.0) kept.push_back(starts[f]);
  if (kept.empty()) {
    x.clear();
    y.clear();
    return;
  }
  const std::size_t len = (kept.size() - 1) * hop + kFrame;
  std::vector<double> xs(len, 0.0), ys(len, 0.0);
  for (std::size_t f = 0; f < kept.size(); ++f)
    for (int i = 0; i < kFrame; ++i) {
      xs[f * hop + i] += w[i] * x[kept[f] + i];
      ys[f * hop + i] += w[i] * y[kept[f] + i];
    }
  x.swap(xs);
  y.swap(ys);
}

// One-third-octave band magnitudes, kBands x frames (row-major per band).
std::vector<std::vector<double>> BandEnvelopes(const std::vector<double>& x) {
  const std::vector<double> w = Window(kFrame);
  const int hop = kFrame / 2;
  const int bins = kFft / 2 + 1;
  std::vector<int> lo(kBands), hi(kBands);
  for (int b = 0; b < kBands; ++b) {
    const double f_lo = kMinFreq * std::pow(2.0, (2.0 * b - 1.0) / 6.0);
    const double f_hi = kMinFreq * std::pow(2.0, (2.0 * b + 1.0) / 6.0);
    auto nearest = [&](double f) {
      int best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (int k = 0; k < bins; ++k) {
        const double d = std::pow(static_cast<double>(k) * kFs / kFft - f, 2);
        if (d < dist) {
          dist = d;
          best = k;
        }
      }
      return best;
    };
    lo[b] = nearest(f_lo);
    hi[b] = nearest(f_hi);
  }
  RealFft fft(kFft);
  std::vector<double> frame(kFft);
  std::vector<std::complex<double>> spec(bins);
  std::vector<std::vector<double>> out(kBands);
  // Frames start at 0, hop, ... strictly before len - kFrame, as in the
  // reference implementation.
  for (std::size_t s = 0; s + kFrame < x.size(); s += hop) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int i = 0; i < kFrame; ++i) frame[i] = w[i] * x[s + i];
    fft.Forward(frame, spec);
    for (int b = 0; b < kBands; ++b) {
      double e = 0.0;
      for (int k = lo[b]; k < hi[b]; ++k) e += std::norm(spec[k]);
      out[b].push_back(std::sqrt(e));
    }
  }
  return out;
}

}  // namespace

double Stoi(std::span<const double> clean, std::span<const double> processed,
            double sample_rate) {
  if (clean.size() != processed.size())
    Fail(ErrorCode::kInvalidArgument, "stoi: length mismatch");
  const long long fs = std::llround(sample_rate);
  if (fs <= 0 || std::abs(sample_rate - static_cast<double>(fs)) > 1e-9)
    Fail(ErrorCode::kInvalidArgument, "stoi: sample rate must be a positive integer");
  const long long g = std::gcd(fs, static_cast<long long>(kFs));
  std::vector<double> x = Resample(clean, static_cast<int>(kFs / g), static_cast<int>(fs / g));
  std::vector<double> y =
      Resample(processed, static_cast<int>(kFs / g), static_cast<int>(fs / g));
  RemoveSilentFrames(x, y);
  const auto xb = BandEnvelopes(x);
  const auto yb = BandEnvelopes(y);
  const std::size_t frames = xb[0].size();
  if (frames < static_cast<std::size_t>(kSegment))
    Fail(ErrorCode::kInvalidArgument, "stoi: signal shorter than one 30-frame segment");

  const double clip = std::pow(10.0, -kBeta / 20.0);
  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> xs(kSegment), ys(kSegment);
  for (std::size_t m = kSegment; m <= frames; ++m) {
    for (int b = 0; b < kBands; ++b) {
      double nx = 0.0, ny = 0.0;
      for (int t = 0; t < kSegment; ++t) {
        xs[t] = xb[b][m - kSegment + t];
        ys[t] = yb[b][m - kSegment + t];
        nx += xs[t] * xs[t];
        ny += ys[t] * ys[t];
      }
      const double alpha = std::sqrt(nx) / (std::sqrt(ny) + kEps);
      for (int t = 0; t < kSegment; ++t) ys[t] = std::min(ys[t] * alpha, xs[t] * (1.0 + clip));
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / kSegment;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / kSegment;
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int t = 0; t < kSegment; ++t) {
        sxx += (xs[t] - mx) * (xs[t] - mx);
        syy += (ys[t] - my) * (ys[t] - my);
        sxy += (xs[t] - mx) * (ys[t] - my);
      }
      total += sxy / ((std::sqrt(sxx) + kEps) * (std::sqrt(syy) + kEps));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace tasres::metrics
