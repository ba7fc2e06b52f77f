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


#include "howlsim/synth.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "howlsim/error.h"
#include "howlsim/fft.h"
#include "howlsim/random.h"

namespace howlsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxHarmonicHz = 5000.0;

struct Formant {
  double freq;
  double bandwidth;
  double gain;
};

double FormantResponse(double f, const Formant (&formants)[3]) {
  double a = 0.0;
  for (const Formant& fm : formants) {
    const double d = (f - fm.freq) / fm.bandwidth;
    a += fm.gain / std::sqrt(1.0 + d * d);
  }
  return a / (1.0 + f / 1500.0);
}

// Raised-sine ramps of `ramp` samples at both ends.
double Envelope(std::size_t i, std::size_t len, std::size_t ramp) {
  const std::size_t edge = std::min(i, len - 1 - i);
  if (edge >= ramp) return 1.0;
  const double s = std::sin(0.5 * std::numbers::pi * edge / ramp);
  return s * s;
}

void AddVoiced(Rng& rng, double f0_base, std::size_t start, std::size_t len,
               Waveform& out) {
  const Formant formants[3] = {
      {rng.Uniform(300.0, 800.0), 90.0, 1.0},
      {rng.Uniform(900.0, 2300.0), 120.0, 0.5},
      {rng.Uniform(2400.0, 3100.0), 180.0, 0.25},
  };
  const double f0_start = f0_base * rng.Uniform(0.85, 1.2);
  const double f0_end = f0_start * rng.Uniform(0.85, 1.15);
  const double peak = rng.Uniform(0.6, 1.0);
  const double f0_mid = 0.5 * (f0_start + f0_end);
  const auto harmonics =
      static_cast<std::size_t>(kMaxHarmonicHz / std::max(f0_start, f0_end));
  std::vector<double> amp(harmonics);
  std::vector<double> offset(harmonics);
  for (std::size_t k = 0; k < harmonics; ++k) {
    amp[k] = FormantResponse((k + 1) * f0_mid, formants);
    offset[k] = rng.Uniform(0.0, kTwoPi);
  }
  const std::size_t ramp = std::min<std::size_t>(len / 2, 320);
  double phase = 0.0;
  for (std::size_t i = 0; i < len && start + i < out.size(); ++i) {
    const double frac = static_cast<double>(i) / len;
    const double f0 = f0_start + (f0_end - f0_start) * frac;
    phase += kTwoPi * f0 / kSampleRate;
    if (phase > kTwoPi) phase -= kTwoPi;
    double v = 0.0;
    for (std::size_t k = 0; k < harmonics; ++k) {
      v += amp[k] * std::sin((k + 1) * phase + offset[k]);
    }
    out[start + i] += peak * Envelope(i, len, ramp) * v;
  }
}

void AddFricative(Rng& rng, std::size_t start, std::size_t len,
                  Waveform& out) {
  const double peak = rng.Uniform(0.3, 0.6);
  const std::size_t ramp = std::min<std::size_t>(len / 2, 160);
  double prev = 0.0;
  for (std::size_t i = 0; i < len && start + i < out.size(); ++i) {
    const double w = rng.Gaussian();
    out[start + i] += peak * Envelope(i, len, ramp) * (w - 0.95 * prev);
    prev = w;
  }
}

}  // namespace

double Energy(WaveformView x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double Rms(WaveformView x) {
  return x.empty() ? 0.0 : std::sqrt(Energy(x) / x.size());
}

Waveform SynthUtterance(std::uint64_t seed, double seconds,
                        const UtteranceStyle& style) {
  if (!(seconds > 0.0)) throw ConfigError("utterance length must be > 0");
  Rng rng(seed);
  const double f0_base = rng.Uniform(style.f0_lo, style.f0_hi);
  Waveform out(SecondsToSamples(seconds), 0.0);
  std::size_t pos = SecondsToSamples(rng.Uniform(0.0, 0.05));
  while (pos < out.size()) {
    const std::uint64_t syllables = 3 + rng.Index(5);
    for (std::uint64_t s = 0; s < syllables && pos < out.size(); ++s) {
      if (rng.Uniform() < 0.2) {
        const std::size_t len = SecondsToSamples(rng.Uniform(0.05, 0.12));
        AddFricative(rng, pos, len, out);
        pos += len;
      }
      const std::size_t len = SecondsToSamples(rng.Uniform(0.12, 0.28));
      AddVoiced(rng, f0_base, pos, len, out);
      pos += len + SecondsToSamples(rng.Uniform(0.02, 0.06));
    }
    pos += SecondsToSamples(rng.Uniform(0.05, std::max(0.05, style.max_pause)));
  }
  const double rms = Rms(out);
  if (rms > 0.0) {
    const double g = std::pow(10.0, style.level_dbfs / 20.0) / rms;
    for (double& v : out) v *= g;
  }
  return out;
}

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite:
      return "white";
    case NoiseKind::kPink:
      return "pink";
    case NoiseKind::kSpeechShaped:
      return "speech_shaped";
  }
  return "white";
}

NoiseKind NoiseKindFromString(const std::string& name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "pink") return NoiseKind::kPink;
  if (name == "speech_shaped") return NoiseKind::kSpeechShaped;
  throw ConfigError("unknown noise kind: " + name);
}

Waveform SynthNoise(NoiseKind kind, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w(samples);
  for (double& v : w) v = rng.Gaussian();
  if (kind != NoiseKind::kWhite && samples > 1) {
    const std::size_t n = NextPow2(samples);
    RealFft fft(n);
    std::vector<double> buf(n, 0.0);
    std::copy(w.begin(), w.end(), buf.begin());
    std::vector<std::complex<double>> spec(n / 2 + 1);
    fft.Forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double f = std::max(20.0, static_cast<double>(k) * kSampleRate / n);
      double shape;
      if (kind == NoiseKind::kPink) {
        shape = 1.0 / std::sqrt(f / 20.0);
      } else {
        const double hp = f / std::sqrt(f * f + 100.0 * 100.0);
        shape = hp / std::sqrt(1.0 + (f / 500.0) * (f / 500.0));
      }
      spec[k] *= shape;
    }
    fft.Inverse(spec, buf);
    std::copy(buf.begin(), buf.begin() + samples, w.begin());
  }
  const double rms = Rms(w);
  if (rms > 0.0) {
    for (double& v : w) v /= rms;
  }
  return w;
}

}  // namespace howlsim
