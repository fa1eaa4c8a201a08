// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_METRICS_METRICS_H_
#define TASRES_METRICS_METRICS_H_

#include <span>

namespace tasres::metrics {

inline constexpr double kClampDb = 300.0;

// Scale-invariant SNR in dB, clamped to [-kClampDb, kClampDb]. Throws
// kInvalidArgument for length mismatch or a silent reference.
double Sisnr(std::span<const double> estimate, std::span<const double> reference,
             bool zero_mean = true);

// Scale-projection SDR. Same formula as Sisnr; reported as "SDR-proj".
double SdrProj(std::span<const double> estimate, std::span<const double> reference);

// 10 log10(sum y^2 / sum e^2) over samples from `exclude_seconds` on,
// clamped to +-kClampDb.
double Erle(std::span<const double> y, std::span<const double> e, double sample_rate,
            double exclude_seconds = 2.0);

// Short-time objective intelligibility of `processed` against `clean`
// (both at sample_rate). Throws kInvalidArgument when fewer than one
// 30-frame segment survives silent-frame removal.
double Stoi(std::span<const double> clean, std::span<const double> processed,
            double sample_rate);

}  // namespace tasres::metrics

#endif  // TASRES_METRICS_METRICS_H_
