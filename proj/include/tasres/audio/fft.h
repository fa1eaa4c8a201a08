// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_AUDIO_FFT_H_
#define TASRES_AUDIO_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tasres {

// Real FFT of fixed size backed by FFTW (estimate-mode plans, so results do
// not depend on planner timing). One instance may be used from one thread at
// a time; separate instances are independent.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // in.size() == size(), out.size() == bins().
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out);
  // Inverse including the 1/size scaling.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out);

 private:
  std::size_t size_;
  std::vector<double> time_;
  std::vector<std::complex<double>> freq_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Full linear convolution (length a.size() + b.size() - 1) via FFT.
std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b);

}  // namespace tasres

#endif  // TASRES_AUDIO_FFT_H_
