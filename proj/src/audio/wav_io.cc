// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/audio/wav_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "tasres/error.h"

namespace tasres {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t Le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t Le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void Put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void Put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void PutTag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorCode::kIo, "read failed: " + path.string());
  const std::string where = " in " + path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file" + where);
  }

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || len > avail)
        Fail(ErrorCode::kUnsupportedFormat, "truncated fmt chunk" + where);
      std::uint16_t format = Le16(chunk + 8);
      channels = Le16(chunk + 10);
      rate = Le32(chunk + 12);
      bits = Le16(chunk + 22);
      if (format == kFormatExtensible && len >= 40) {
        format = Le16(chunk + 8 + 24);  // first two bytes of the sub-format GUID
      }
      if (format != kFormatPcm)
        Fail(ErrorCode::kUnsupportedFormat,
             "unsupported format: only PCM is accepted" + where);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min<std::size_t>(len, avail);
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) Fail(ErrorCode::kUnsupportedFormat, "missing fmt chunk" + where);
  if (data == nullptr)
    Fail(ErrorCode::kUnsupportedFormat, "missing data chunk" + where);
  if (channels != 1)
    Fail(ErrorCode::kChannelCount,
         "channel count != 1 (got " + std::to_string(channels) + ")" + where);
  if (bits != 16)
    Fail(ErrorCode::kUnsupportedFormat,
         "unsupported format: " + std::to_string(bits) +
             "-bit samples, expected 16" + where);
  if (rate == 0) Fail(ErrorCode::kUnsupportedFormat, "zero sample rate" + where);

  Waveform w(data_len / 2, static_cast<int>(rate));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto code = static_cast<std::int16_t>(Le16(data + 2 * i));
    w[i] = code / 32768.0;
  }
  return w;
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave) {
  Require(wave.sample_rate > 0, "sample rate must be positive");
  if (!AllFinite(wave.samples))
    Fail(ErrorCode::kNumerical, "non-finite sample written to " + path.string());
  const std::uint32_t data_len = static_cast<std::uint32_t>(wave.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  PutTag(out, "RIFF");
  Put32(out, 36 + data_len);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  Put32(out, 16);
  Put16(out, kFormatPcm);
  Put16(out, 1);
  Put32(out, static_cast<std::uint32_t>(wave.sample_rate));
  Put32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  Put16(out, 2);
  Put16(out, 16);
  PutTag(out, "data");
  Put32(out, data_len);
  for (double v : wave.samples) {
    const double code = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
    Put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorCode::kIo, "cannot create " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace tasres
