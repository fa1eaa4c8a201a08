// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/audio/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "tasres/error.h"

namespace tasres {
namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

RealFft::RealFft(std::size_t size)
    : size_(size), time_(size), freq_(size / 2 + 1) {
  Require(size >= 2, "FFT size must be >= 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  auto* cplx = reinterpret_cast<fftw_complex*>(freq_.data());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), time_.data(),
                                       cplx, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(size), cplx,
                                       time_.data(), FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  Require(in.size() == size_ && out.size() == bins(), "FFT size mismatch");
  std::copy(in.begin(), in.end(), time_.begin());
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(freq_.begin(), freq_.end(), out.begin());
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  Require(in.size() == bins() && out.size() == size_, "FFT size mismatch");
  std::copy(in.begin(), in.end(), freq_.begin());
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = time_[i] * scale;
}

std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = NextPow2(out_len);
  RealFft fft(std::max<std::size_t>(n, 2));
  std::vector<double> pa(fft.size(), 0.0), pb(fft.size(), 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.Forward(pa, fa);
  fft.Forward(pb, fb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  fft.Inverse(fa, pa);
  pa.resize(out_len);
  return pa;
}

}  // namespace tasres
