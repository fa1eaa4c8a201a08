// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tasres/error.h"

namespace tasres::metrics {
namespace {

double ClampDb(double v) {
  if (std::isnan(v)) return v;
  return std::clamp(v, -kClampDb, kClampDb);
}

double RatioDb(double num, double den) {
  if (num <= 0.0) return -kClampDb;
  if (den <= 0.0) return kClampDb;
  return ClampDb(10.0 * std::log10(num / den));
}

}  // namespace

double Sisnr(std::span<const double> estimate, std::span<const double> reference,
             bool zero_mean) {
  if (estimate.size() != reference.size())
    Fail(ErrorCode::kInvalidArgument, "sisnr: length mismatch");
  const std::size_t n = estimate.size();
  if (n == 0) Fail(ErrorCode::kEmptyInput, "sisnr: empty input");
  double me = 0.0, ms = 0.0;
  if (zero_mean) {
    me = std::accumulate(estimate.begin(), estimate.end(), 0.0) / static_cast<double>(n);
    ms = std::accumulate(reference.begin(), reference.end(), 0.0) / static_cast<double>(n);
  }
  double dot = 0.0, q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += (estimate[i] - me) * (reference[i] - ms);
    q += (reference[i] - ms) * (reference[i] - ms);
  }
  if (q <= 0.0) Fail(ErrorCode::kInvalidArgument, "sisnr: reference has zero energy");
  const double scale = dot / q;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = scale * (reference[i] - ms);
    const double e = (estimate[i] - me) - t;
    target += t * t;
    noise += e * e;
  }
  return RatioDb(target, noise);
}

double SdrProj(std::span<const double> estimate, std::span<const double> reference) {
  return Sisnr(estimate, reference, true);
}

double Erle(std::span<const double> y, std::span<const double> e, double sample_rate,
            double exclude_seconds) {
  if (y.size() != e.size()) Fail(ErrorCode::kInvalidArgument, "erle: length mismatch");
  if (exclude_seconds < 0.0) Fail(ErrorCode::kInvalidArgument, "erle: negative exclusion");
  const auto start = static_cast<std::size_t>(std::llround(exclude_seconds * sample_rate));
  if (start >= y.size())
    Fail(ErrorCode::kInvalidArgument, "erle: signal shorter than the convergence window");
  double ey = 0.0, ee = 0.0;
  for (std::size_t i = start; i < y.size(); ++i) {
    ey += y[i] * y[i];
    ee += e[i] * e[i];
  }
  return RatioDb(ey, ee);
}

}  // namespace tasres::metrics
