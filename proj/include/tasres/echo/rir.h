// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ECHO_RIR_H_
#define TASRES_ECHO_RIR_H_

#include <array>
#include <vector>

#include "tasres/audio/rng.h"
#include "tasres/audio/waveform.h"

namespace tasres::echo {

using Point3 = std::array<double, 3>;

inline constexpr double kSpeedOfSound = 343.0;

struct RoomSpec {
  Point3 dimensions{4.0, 4.0, 3.0};
  double t60 = 0.3;
  Point3 mic{1.0, 1.0, 1.5};
  Point3 src{3.0, 2.5, 1.5};
  int rir_len = 0;  // samples; 0 selects ceil(t60 * fs) + 1024
  int sample_rate = kDefaultSampleRate;
  // Allen-Berkley 100 Hz high-pass applied to the response.
  bool highpass = true;

  // Throws kInvalidArgument when a position is not strictly inside the room
  // or a dimension / t60 is non-positive.
  void Validate() const;
  int EffectiveLength() const;
};

struct RoomSampling {
  double min_dim = 2.0;
  double max_dim = 5.0;
  double min_t60 = 0.150;
  double max_t60 = 0.450;
  double wall_margin = 0.3;   // metres kept between devices and walls
  double min_distance = 0.3;  // metres between loudspeaker and microphone
};

RoomSpec SampleRoom(Rng& rng, const RoomSampling& sampling = {},
                    int sample_rate = kDefaultSampleRate);

// Uniform wall absorption from Sabine's formula for the room's t60.
double SabineAbsorption(const RoomSpec& room);

// Allen-Berkley image method with uniform wall reflection
// beta = sqrt(1 - absorption), delays rounded to whole samples and the
// method's 100 Hz high-pass filter (when room.highpass is set).
std::vector<double> SimulateRir(const RoomSpec& room);

double DirectPathDelaySamples(const RoomSpec& room);

}  // namespace tasres::echo

#endif  // TASRES_ECHO_RIR_H_
