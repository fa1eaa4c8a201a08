// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_TESTS_COMMON_FIXTURES_H_
#define TASRES_TESTS_COMMON_FIXTURES_H_

#include <vector>

#include "tasres/audio/rng.h"
#include "tasres/model/tasnet.h"

namespace tasres::testing {

// Small enough for a full finite-difference sweep over every parameter.
inline model::ModelConfig GradCheckConfig(model::Variant variant = model::Variant::kMI) {
  model::ModelConfig c;
  c.variant = variant;
  c.enc_filters = 6;
  c.enc_len = 8;
  c.enc_hop = 2;
  c.bottleneck = 4;
  c.skip_channels = 4;
  c.block_channels = 6;
  c.mi_dconv_kernel = 5;
  c.repeats = 3;
  c.blocks_per_repeat = 2;
  c.lookahead_frames = 2;
  c.eln.n_taps = 6;
  c.eln.alpha = 0.8;
  return c;
}

// The desk-scale size used for the overfit and variant runs.
inline model::ModelConfig DeskConfig(model::Variant variant = model::Variant::kMI) {
  model::ModelConfig c;
  c.variant = variant;
  c.enc_filters = 64;
  c.bottleneck = 32;
  c.skip_channels = 32;
  c.block_channels = 64;
  c.repeats = 2;
  c.blocks_per_repeat = 4;
  return c;
}

inline std::vector<double> RandomSignal(Rng& rng, std::size_t n, double scale = 0.1) {
  std::vector<double> x(n);
  for (double& v : x) v = scale * rng.Normal();
  return x;
}

}  // namespace tasres::testing

#endif  // TASRES_TESTS_COMMON_FIXTURES_H_
