// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_LAEC_FDKF_H_
#define TASRES_LAEC_FDKF_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tasres/audio/fft.h"
#include "tasres/echo/scenario.h"

namespace tasres::laec {

struct FdkfConfig {
  int block_len = 2048;        // FFT size is 2 * block_len (50% overlap-save)
  double transition = 0.999;   // a in the first-order Markov echo path model
  double psi_smoothing = 0.9;  // forgetting factor of the noise PSD estimate
  double initial_p = 1.0;      // initial state-error variance per bin
  double epsilon = 1e-10;      // division guard

  void Validate() const;
};

// Frequency-domain adaptive Kalman filter echo canceller. Per block:
//   predict   W+ = a W,  P+ = a^2 P + (1 - a^2) |W|^2
//   estimate  d_hat = last half of IFFT(X W+),  e = y - d_hat
//   noise     Psi = lambda Psi + (1 - lambda) |E|^2,  E = FFT([0, e])
//   gain      K = P+ conj(X) / (|X|^2 P+ + 2 Psi)
//   correct   W = constrain(W+ + K E),  P = (1 - K X / 2) P+
// where constrain() zeroes the second half of the time-domain filter.
class Fdkf {
 public:
  explicit Fdkf(const FdkfConfig& config = {});

  const FdkfConfig& config() const { return config_; }
  int block_len() const { return config_.block_len; }

  // x_block, y_block, s_aec and d_hat all have block_len samples.
  void ProcessBlock(std::span<const double> x_block, std::span<const double> y_block,
                    std::span<double> s_aec, std::span<double> d_hat);

  const std::vector<std::complex<double>>& filter() const { return w_; }
  const std::vector<double>& state_variance() const { return p_; }
  const std::vector<double>& noise_psd() const { return psi_; }
  // Time-domain filter estimate (block_len taps).
  std::vector<double> ImpulseResponse();

 private:
  FdkfConfig config_;
  RealFft fft_;
  std::vector<double> x_buffer_;
  std::vector<std::complex<double>> w_, x_spec_, e_spec_, tmp_spec_;
  std::vector<double> p_, psi_;
  std::vector<double> time_;
};

struct LaecResult {
  Waveform s_aec;
  Waveform d_hat;
};

// Runs a fresh filter over whole signals; a trailing partial block is zero
// padded and trimmed. Throws on length mismatch.
LaecResult RunFdkf(const Waveform& x, const Waveform& y, const FdkfConfig& config = {});

// Fills item.s_aec and item.d_hat.
void RunLaec(echo::ScenarioItem& item, const FdkfConfig& config = {});

}  // namespace tasres::laec

#endif  // TASRES_LAEC_FDKF_H_
