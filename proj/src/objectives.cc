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


#include "howlsim/objectives.h"

#include <algorithm>
#include <cmath>

#include "howlsim/error.h"

namespace howlsim {
namespace {

void CheckSameLength(WaveformView a, WaveformView b, const char* what) {
  if (a.size() != b.size()) {
    throw GeometryError(std::string(what) + ": length mismatch");
  }
}

double Dot(WaveformView a, WaveformView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string ToString(PlaybackSelector sel) {
  switch (sel) {
    case PlaybackSelector::kD21:
      return "d21";
    case PlaybackSelector::kD21S:
      return "d21_s";
    case PlaybackSelector::kD21PlusD11:
      return "d21+d11";
    case PlaybackSelector::kD21SPlusD11S:
      return "d21_s+d11_s";
  }
  return "d21";
}

PlaybackSelector PlaybackSelectorFromString(const std::string& name) {
  if (name == "d21") return PlaybackSelector::kD21;
  if (name == "d21_s") return PlaybackSelector::kD21S;
  if (name == "d21+d11") return PlaybackSelector::kD21PlusD11;
  if (name == "d21_s+d11_s") return PlaybackSelector::kD21SPlusD11S;
  throw ConfigError("unknown playback selector: " + name);
}

void LossConfig::Validate() const {
  if (!(lambda >= 0.0) || !(beta >= 0.0)) {
    throw ConfigError("loss weights must be >= 0");
  }
  if (!(si_sdr_cap_db > 0.0)) throw ConfigError("SI-SDR cap must be > 0");
}

double SiSdr(WaveformView est, WaveformView ref, double cap_db) {
  CheckSameLength(est, ref, "SiSdr");
  const double ref_energy = Dot(ref, ref);
  if (!(ref_energy > 0.0)) {
    throw DegenerateInputError("SiSdr: reference has no energy");
  }
  const double alpha = Dot(est, ref) / ref_energy;
  double target = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double t = alpha * ref[i];
    const double r = est[i] - t;
    target += t * t;
    residual += r * r;
  }
  if (target == 0.0) return -cap_db;
  if (residual == 0.0) return cap_db;
  return std::clamp(10.0 * std::log10(target / residual), -cap_db, cap_db);
}

double MagnitudeMae(const Spectrogram& a, const Spectrogram& b) {
  if (!a.SameGeometry(b)) {
    throw GeometryError("MagnitudeMae: spectrogram geometry mismatch");
  }
  const auto& da = a.data();
  const auto& db = b.data();
  if (da.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    s += std::abs(std::abs(da[i]) - std::abs(db[i]));
  }
  return s / static_cast<double>(da.size());
}

double Loss1(WaveformView est, WaveformView ref, const Spectrogram& est_spec,
             const Spectrogram& ref_spec, const LossConfig& cfg) {
  cfg.Validate();
  return -SiSdr(est, ref, cfg.si_sdr_cap_db) +
         cfg.lambda * MagnitudeMae(est_spec, ref_spec);
}

double AbsCorrelation(WaveformView a, WaveformView b) {
  CheckSameLength(a, b, "AbsCorrelation");
  if (a.empty()) return 0.0;
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::min(1.0, std::abs(sab) / std::sqrt(saa * sbb));
}

double CorrLoss(WaveformView est, WaveformView target, WaveformView playback) {
  CheckSameLength(est, target, "CorrLoss");
  CheckSameLength(est, playback, "CorrLoss");
  if (!(Dot(target, target) > 0.0)) {
    throw DegenerateInputError("CorrLoss: target has no energy");
  }
  if (!(Dot(playback, playback) > 0.0)) {
    throw DegenerateInputError("CorrLoss: playback has no energy");
  }
  Waveform residual(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) residual[i] = est[i] - target[i];
  return (1.0 - AbsCorrelation(est, target)) +
         AbsCorrelation(residual, playback);
}

double Loss2(WaveformView est, WaveformView ref, const Spectrogram& est_spec,
             const Spectrogram& ref_spec, WaveformView playback,
             const LossConfig& cfg) {
  const double l1 = Loss1(est, ref, est_spec, ref_spec, cfg);
  if (cfg.beta == 0.0) return l1;
  return l1 + cfg.beta * CorrLoss(est, ref, playback);
}

Waveform SelectPlayback(PlaybackSelector sel, WaveformView d21,
                        WaveformView d21_s, WaveformView d11,
                        WaveformView d11_s) {
  switch (sel) {
    case PlaybackSelector::kD21:
      return Waveform(d21.begin(), d21.end());
    case PlaybackSelector::kD21S:
      return Waveform(d21_s.begin(), d21_s.end());
    case PlaybackSelector::kD21PlusD11: {
      CheckSameLength(d21, d11, "SelectPlayback");
      Waveform out(d21.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = d21[i] + d11[i];
      return out;
    }
    case PlaybackSelector::kD21SPlusD11S: {
      CheckSameLength(d21_s, d11_s, "SelectPlayback");
      Waveform out(d21_s.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = d21_s[i] + d11_s[i];
      }
      return out;
    }
  }
  throw ConfigError("SelectPlayback: bad selector");
}

}  // namespace howlsim
