// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_AUDIO_FRAMING_H_
#define TASRES_AUDIO_FRAMING_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tasres {

struct FrameSpec {
  int frame_len = 40;
  int hop = 10;

  void Validate() const;
};

// Number of whole frames inside an unpadded signal.
std::size_t FrameCount(std::size_t n_samples, const FrameSpec& spec);

// Frame count under the encoder padding policy: frame_len - hop zeros on the
// left and zeros on the right up to a multiple of hop, so K = ceil(n / hop).
// Frame k covers samples [k*hop - (frame_len - hop), k*hop + hop).
std::size_t PaddedFrameCount(std::size_t n_samples, const FrameSpec& spec);

// Column-major frame_len x K buffer under the padding policy above.
std::vector<double> FrameSignal(std::span<const double> x,
                                const FrameSpec& spec);

// Adjoint of FrameSignal: overlap-adds frame_len x K columns and trims the
// padding back to n_samples.
std::vector<double> OverlapAdd(std::span<const double> frames,
                               std::size_t n_frames, std::size_t n_samples,
                               const FrameSpec& spec);

}  // namespace tasres

#endif  // TASRES_AUDIO_FRAMING_H_
