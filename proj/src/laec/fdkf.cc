// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/laec/fdkf.h"

#include <algorithm>

#include "tasres/error.h"

namespace tasres::laec {

void FdkfConfig::Validate() const {
  Require(block_len >= 1, "FDKF block_len must be positive");
  Require(transition > 0.0 && transition < 1.0, "FDKF transition must be in (0, 1)");
  Require(psi_smoothing >= 0.0 && psi_smoothing < 1.0, "FDKF psi_smoothing must be in [0, 1)");
  Require(initial_p >= 0.0, "FDKF initial_p must be non-negative");
  Require(epsilon > 0.0, "FDKF epsilon must be positive");
}

Fdkf::Fdkf(const FdkfConfig& config)
    : config_((config.Validate(), config)),
      fft_(2 * static_cast<std::size_t>(config.block_len)),
      x_buffer_(fft_.size(), 0.0),
      w_(fft_.bins()),
      x_spec_(fft_.bins()),
      e_spec_(fft_.bins()),
      tmp_spec_(fft_.bins()),
      p_(fft_.bins(), config.initial_p),
      psi_(fft_.bins(), 0.0),
      time_(fft_.size(), 0.0) {}

void Fdkf::ProcessBlock(std::span<const double> x_block, std::span<const double> y_block,
                        std::span<double> s_aec, std::span<double> d_hat) {
  const std::size_t n = static_cast<std::size_t>(config_.block_len);
  Require(x_block.size() == n && y_block.size() == n && s_aec.size() == n &&
              d_hat.size() == n,
          "FDKF block size mismatch");
  const std::size_t bins = fft_.bins();
  const double a = config_.transition;
  const double eps = config_.epsilon;

  std::copy(x_buffer_.begin() + n, x_buffer_.end(), x_buffer_.begin());
  std::copy(x_block.begin(), x_block.end(), x_buffer_.begin() + n);
  fft_.Forward(x_buffer_, x_spec_);

  // Predict.
  for (std::size_t k = 0; k < bins; ++k) {
    p_[k] = a * a * p_[k] + (1.0 - a * a) * std::norm(w_[k]);
    w_[k] *= a;
    tmp_spec_[k] = x_spec_[k] * w_[k];
  }

  // Echo estimate: the second half of the circular output is the valid
  // linear-convolution part.
  fft_.Inverse(tmp_spec_, time_);
  for (std::size_t i = 0; i < n; ++i) {
    d_hat[i] = time_[n + i];
    s_aec[i] = y_block[i] - d_hat[i];
  }

  std::fill(time_.begin(), time_.begin() + n, 0.0);
  std::copy(s_aec.begin(), s_aec.end(), time_.begin() + n);
  fft_.Forward(time_, e_spec_);

  // Correct.
  const double lambda = config_.psi_smoothing;
  for (std::size_t k = 0; k < bins; ++k) {
    psi_[k] = lambda * psi_[k] + (1.0 - lambda) * std::norm(e_spec_[k]);
    const double x_pow = std::norm(x_spec_[k]);
    const std::complex<double> gain =
        p_[k] * std::conj(x_spec_[k]) / (x_pow * p_[k] + 2.0 * psi_[k] + eps);
    w_[k] += gain * e_spec_[k];
    const double kx = std::real(gain * x_spec_[k]);
    p_[k] = std::max(0.0, (1.0 - 0.5 * kx) * p_[k]);
  }

  // Gradient constraint.
  fft_.Inverse(w_, time_);
  std::fill(time_.begin() + n, time_.end(), 0.0);
  fft_.Forward(time_, w_);
}

std::vector<double> Fdkf::ImpulseResponse() {
  fft_.Inverse(w_, time_);
  return {time_.begin(), time_.begin() + config_.block_len};
}

LaecResult RunFdkf(const Waveform& x, const Waveform& y, const FdkfConfig& config) {
  if (x.size() != y.size())
    Fail(ErrorCode::kInvalidArgument, "LAEC: far-end and microphone lengths differ");
  LaecResult out{Waveform(y.size(), y.sample_rate), Waveform(y.size(), y.sample_rate)};
  if (y.empty()) return out;
  Fdkf filter(config);
  const std::size_t n = static_cast<std::size_t>(filter.block_len());
  std::vector<double> xb(n), yb(n), sb(n), db(n);
  for (std::size_t start = 0; start < y.size(); start += n) {
    const std::size_t count = std::min(n, y.size() - start);
    std::fill(xb.begin(), xb.end(), 0.0);
    std::fill(yb.begin(), yb.end(), 0.0);
    std::copy_n(x.samples.begin() + start, count, xb.begin());
    std::copy_n(y.samples.begin() + start, count, yb.begin());
    filter.ProcessBlock(xb, yb, sb, db);
    for (std::size_t i = 0; i < count; ++i) {
      out.d_hat[start + i] = db[i];
      out.s_aec[start + i] = y[start + i] - db[i];
    }
  }
  return out;
}

void RunLaec(echo::ScenarioItem& item, const FdkfConfig& config) {
  LaecResult r = RunFdkf(item.x, item.y, config);
  item.s_aec = std::move(r.s_aec);
  item.d_hat = std::move(r.d_hat);
  item.has_laec = true;
}

}  // namespace tasres::laec
