// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/echo/rir.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tasres/error.h"

namespace tasres::echo {
namespace {

double Distance(const Point3& a, const Point3& b) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

bool StrictlyInside(const Point3& p, const Point3& dims) {
  for (int i = 0; i < 3; ++i)
    if (!(p[i] > 0.0 && p[i] < dims[i])) return false;
  return true;
}

// Second-order IIR with a zero at DC and a 100 Hz corner.
void AllenBerkleyHighpass(std::vector<double>& h, int sample_rate) {
  const double w = 2.0 * std::numbers::pi * 100.0 / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : h) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

}  // namespace

void RoomSpec::Validate() const {
  for (double d : dimensions) Require(d > 0.0, "room dimensions must be positive");
  Require(t60 > 0.0, "t60 must be positive");
  Require(sample_rate > 0, "sample rate must be positive");
  Require(rir_len >= 0, "rir_len must be non-negative");
  Require(StrictlyInside(mic, dimensions), "microphone position outside room");
  Require(StrictlyInside(src, dimensions), "loudspeaker position outside room");
}

int RoomSpec::EffectiveLength() const {
  if (rir_len > 0) return rir_len;
  return static_cast<int>(std::ceil(t60 * sample_rate)) + 1024;
}

RoomSpec SampleRoom(Rng& rng, const RoomSampling& sampling, int sample_rate) {
  RoomSpec room;
  room.sample_rate = sample_rate;
  for (auto& d : room.dimensions) d = rng.Uniform(sampling.min_dim, sampling.max_dim);
  room.t60 = rng.Uniform(sampling.min_t60, sampling.max_t60);
  auto draw_point = [&] {
    Point3 p;
    for (int i = 0; i < 3; ++i)
      p[i] = rng.Uniform(sampling.wall_margin,
                         room.dimensions[i] - sampling.wall_margin);
    return p;
  };
  room.mic = draw_point();
  do {
    room.src = draw_point();
  } while (Distance(room.mic, room.src) < sampling.min_distance);
  return room;
}

double SabineAbsorption(const RoomSpec& room) {
  const auto& [lx, ly, lz] = room.dimensions;
  const double volume = lx * ly * lz;
  const double surface = 2.0 * (lx * ly + lx * lz + ly * lz);
  const double alpha =
      24.0 * std::numbers::ln10 * volume / (kSpeedOfSound * surface * room.t60);
  return std::min(alpha, 1.0);
}

double DirectPathDelaySamples(const RoomSpec& room) {
  return Distance(room.mic, room.src) / kSpeedOfSound * room.sample_rate;
}

std::vector<double> SimulateRir(const RoomSpec& room) {
  room.Validate();
  const int len = room.EffectiveLength();
  std::vector<double> h(static_cast<std::size_t>(len), 0.0);
  const double beta = std::sqrt(1.0 - SabineAbsorption(room));
  const double samples_per_metre = room.sample_rate / kSpeedOfSound;
  const double max_dist = len / samples_per_metre;

  std::array<int, 3> max_order;
  for (int i = 0; i < 3; ++i)
    max_order[i] = static_cast<int>(std::ceil(max_dist / (2.0 * room.dimensions[i]))) + 1;

  // Image offsets along one axis: coordinate (1 - 2q) src + 2 m L and the
  // number of wall reflections |m - q| + |m|.
  struct AxisImage {
    double offset;
    int reflections;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int i = 0; i < 3; ++i) {
    for (int m = -max_order[i]; m <= max_order[i]; ++m) {
      for (int q = 0; q <= 1; ++q) {
        const double coord = (1 - 2 * q) * room.src[i] + 2.0 * m * room.dimensions[i];
        axes[i].push_back({coord - room.mic[i], std::abs(m - q) + std::abs(m)});
      }
    }
  }
  for (const auto& ix : axes[0]) {
    for (const auto& iy : axes[1]) {
      const double dxy = ix.offset * ix.offset + iy.offset * iy.offset;
      if (dxy > max_dist * max_dist) continue;
      for (const auto& iz : axes[2]) {
        const double dist = std::sqrt(dxy + iz.offset * iz.offset);
        const long delay = std::lround(dist * samples_per_metre);
        if (delay >= len) continue;
        const int order = ix.reflections + iy.reflections + iz.reflections;
        const double gain = order == 0 ? 1.0 : std::pow(beta, order);
        if (gain == 0.0) continue;
        h[static_cast<std::size_t>(delay)] += gain / (4.0 * std::numbers::pi * dist);
      }
    }
  }
  if (room.highpass) AllenBerkleyHighpass(h, room.sample_rate);
  return h;
}

}  // namespace tasres::echo
