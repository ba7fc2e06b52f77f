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


// Separation metric and training losses: SI-SDR, magnitude MAE, the
// playback-correlation loss and their weighted combinations.

#ifndef HOWLSIM_OBJECTIVES_H_
#define HOWLSIM_OBJECTIVES_H_

#include <string>

#include "howlsim/spectral.h"
#include "howlsim/types.h"

namespace howlsim {

inline constexpr double kDefaultSiSdrCapDb = 100.0;

// Which playback component the correlation loss penalizes.
enum class PlaybackSelector { kD21, kD21S, kD21PlusD11, kD21SPlusD11S };

std::string ToString(PlaybackSelector sel);
// Accepts "d21", "d21_s", "d21+d11", "d21_s+d11_s".
PlaybackSelector PlaybackSelectorFromString(const std::string& name);

struct LossConfig {
  double lambda = 10000.0;
  double beta = 10.0;
  PlaybackSelector playback = PlaybackSelector::kD21;
  double si_sdr_cap_db = kDefaultSiSdrCapDb;

  // Throws ConfigError for negative weights or a non-positive cap.
  void Validate() const;
};

// 10 log10(|a r|^2 / |e - a r|^2) with a = <e, r> / <r, r>, no mean removal,
// clamped to [-cap, cap]. A zero estimate gives -cap and a perfect one +cap.
// Throws DegenerateInputError if ref has no energy, GeometryError on a
// length mismatch.
double SiSdr(WaveformView est, WaveformView ref,
             double cap_db = kDefaultSiSdrCapDb);

// Mean over all time-frequency cells of ||A| - |B||.
double MagnitudeMae(const Spectrogram& a, const Spectrogram& b);

// -SiSdr(est, ref) + lambda * MagnitudeMae(est_spec, ref_spec).
double Loss1(WaveformView est, WaveformView ref, const Spectrogram& est_spec,
             const Spectrogram& ref_spec, const LossConfig& cfg = {});

// Absolute Pearson correlation at zero lag. Zero when either signal has no
// variance.
double AbsCorrelation(WaveformView a, WaveformView b);

// [1 - corr(est, target)] + corr(est - target, playback), in [0, 2].
// Throws DegenerateInputError if target or playback has no energy.
double CorrLoss(WaveformView est, WaveformView target, WaveformView playback);

// Loss1 + beta * CorrLoss(est, ref, playback).
double Loss2(WaveformView est, WaveformView ref, const Spectrogram& est_spec,
             const Spectrogram& ref_spec, WaveformView playback,
             const LossConfig& cfg = {});

// Builds the playback signal named by `sel` from the scene labels.
Waveform SelectPlayback(PlaybackSelector sel, WaveformView d21,
                        WaveformView d21_s, WaveformView d11,
                        WaveformView d11_s);

}  // namespace howlsim

#endif  // HOWLSIM_OBJECTIVES_H_
