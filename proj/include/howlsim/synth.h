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


// Deterministic stand-ins for speech and noise corpora: a formant-filtered
// harmonic source organised into syllables, and coloured Gaussian noise.

#ifndef HOWLSIM_SYNTH_H_
#define HOWLSIM_SYNTH_H_

#include <cstdint>
#include <string>

#include "howlsim/types.h"

namespace howlsim {

struct UtteranceStyle {
  double f0_lo = 90.0;   // Hz, speaker base pitch drawn in [f0_lo, f0_hi]
  double f0_hi = 220.0;
  double max_pause = 0.25;  // s, longest inter-phrase pause
  double level_dbfs = -26.0;  // RMS of the result
};

// Speech-like utterance of exactly `seconds`, determined by `seed`.
Waveform SynthUtterance(std::uint64_t seed, double seconds,
                        const UtteranceStyle& style = {});

enum class NoiseKind { kWhite, kPink, kSpeechShaped };

std::string ToString(NoiseKind kind);
NoiseKind NoiseKindFromString(const std::string& name);

// Unit-RMS noise of `samples` length.
Waveform SynthNoise(NoiseKind kind, std::size_t samples, std::uint64_t seed);

// RMS over the whole signal; 0 for empty input.
double Rms(WaveformView x);
double Energy(WaveformView x);

}  // namespace howlsim

#endif  // HOWLSIM_SYNTH_H_
