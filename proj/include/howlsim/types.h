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

#ifndef HOWLSIM_TYPES_H_
#define HOWLSIM_TYPES_H_

#include <cstddef>
#include <span>
#include <vector>

namespace howlsim {

// Everything in the toolkit runs at a single rate.
inline constexpr int kSampleRate = 16000;
inline constexpr double kSpeedOfSound = 343.0;  // m/s

// Mono signal, full scale = +/-1.0.
using Waveform = std::vector<double>;
using WaveformView = std::span<const double>;

inline std::size_t SecondsToSamples(double seconds) {
  return static_cast<std::size_t>(seconds * kSampleRate + 0.5);
}

}  // namespace howlsim

#endif  // HOWLSIM_TYPES_H_
