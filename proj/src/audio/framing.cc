// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/audio/framing.h"

#include "tasres/error.h"

namespace tasres {

void FrameSpec::Validate() const {
  Require(hop > 0 && hop <= frame_len, "frame spec requires 0 < hop <= frame_len");
}

std::size_t FrameCount(std::size_t n_samples, const FrameSpec& spec) {
  spec.Validate();
  const auto len = static_cast<std::size_t>(spec.frame_len);
  if (n_samples < len) return 0;
  return (n_samples - len) / static_cast<std::size_t>(spec.hop) + 1;
}

std::size_t PaddedFrameCount(std::size_t n_samples, const FrameSpec& spec) {
  spec.Validate();
  const auto hop = static_cast<std::size_t>(spec.hop);
  return (n_samples + hop - 1) / hop;
}

std::vector<double> FrameSignal(std::span<const double> x,
                                const FrameSpec& spec) {
  const std::size_t k_frames = PaddedFrameCount(x.size(), spec);
  const std::size_t len = static_cast<std::size_t>(spec.frame_len);
  const long offset = spec.frame_len - spec.hop;
  std::vector<double> frames(len * k_frames, 0.0);
  for (std::size_t k = 0; k < k_frames; ++k) {
    const long start = static_cast<long>(k) * spec.hop - offset;
    for (std::size_t t = 0; t < len; ++t) {
      const long n = start + static_cast<long>(t);
      if (n >= 0 && n < static_cast<long>(x.size())) frames[k * len + t] = x[n];
    }
  }
  return frames;
}

std::vector<double> OverlapAdd(std::span<const double> frames,
                               std::size_t n_frames, std::size_t n_samples,
                               const FrameSpec& spec) {
  const std::size_t len = static_cast<std::size_t>(spec.frame_len);
  Require(frames.size() == len * n_frames, "overlap-add: frame buffer size mismatch");
  const long offset = spec.frame_len - spec.hop;
  std::vector<double> out(n_samples, 0.0);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const long start = static_cast<long>(k) * spec.hop - offset;
    for (std::size_t t = 0; t < len; ++t) {
      const long n = start + static_cast<long>(t);
      if (n >= 0 && n < static_cast<long>(n_samples)) out[n] += frames[k * len + t];
    }
  }
  return out;
}

}  // namespace tasres
