// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_AUDIO_RNG_H_
#define TASRES_AUDIO_RNG_H_

#include <array>
#include <cstdint>

namespace tasres {

// xoshiro256** (Blackman & Vigna), seeded through splitmix64. The integer
// stream is identical on every platform. Real-valued draws are computed from
// it with plain IEEE arithmetic; Normal() additionally goes through libm
// log/cos/sin.
//
// An Rng has a single owner. Parallel workers derive their own instance with
// ForStream(master_seed, worker_index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  static Rng ForStream(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t& state);

}  // namespace tasres

#endif  // TASRES_AUDIO_RNG_H_
