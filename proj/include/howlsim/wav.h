// Copyright 2026 The Howlsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// RIFF/WAVE reading and writing. Output is always mono 32-bit float.

#ifndef HOWLSIM_WAV_H_
#define HOWLSIM_WAV_H_

#include <filesystem>

#include "howlsim/types.h"

namespace howlsim {

struct WavData {
  int sample_rate = 0;
  int channels = 0;
  std::vector<Waveform> samples;  // per channel, full-scale +/-1
};

// Accepts PCM 16/24/32-bit and IEEE float 32/64-bit, with or without the
// extensible format header.
WavData ReadWav(const std::filesystem::path& path);

// Reads a file that must be 16 kHz mono; throws IoError otherwise.
Waveform ReadMonoWav(const std::filesystem::path& path);

void WriteWav(const std::filesystem::path& path, WaveformView x,
              int sample_rate = kSampleRate);

}  // namespace howlsim

#endif  // HOWLSIM_WAV_H_
