// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_AUDIO_WAV_IO_H_
#define TASRES_AUDIO_WAV_IO_H_

#include <filesystem>

#include "tasres/audio/waveform.h"

namespace tasres {

// Reads a 16-bit PCM mono RIFF/WAVE file. Throws Error with kIo,
// kUnsupportedFormat or kChannelCount.
Waveform ReadWav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clipped to the representable range
// and rounded to the nearest code.
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

}  // namespace tasres

#endif  // TASRES_AUDIO_WAV_IO_H_
