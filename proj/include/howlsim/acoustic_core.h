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

// Physical ingredients of a two-device meeting room: image-method room
// impulse responses, loudspeaker/amplifier nonlinearities and linear
// convolution.

#ifndef HOWLSIM_ACOUSTIC_CORE_H_
#define HOWLSIM_ACOUSTIC_CORE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "howlsim/types.h"

namespace howlsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double Distance(const Vec3& a, const Vec3& b);

// Emitter and receiver slots of the standard two-device layout. Each device
// has a loudspeaker and a microphone; the near-end talker is the third
// emitter. That gives 3 x 2 = 6 paths per set: the four device-to-device
// paths h11, h12, h21, h22 plus the talker paths to each microphone.
enum Emitter : int { kLoudspeaker1 = 0, kLoudspeaker2 = 1, kTalker = 2 };
enum Receiver : int { kMic1 = 0, kMic2 = 1 };
inline constexpr int kNumEmitters = 3;
inline constexpr int kNumReceivers = 2;

struct RoomSpec {
  Vec3 dimensions;                     // meters
  std::vector<Vec3> source_positions;  // indexed by Emitter
  std::vector<Vec3> mic_positions;     // indexed by Receiver
  double rt60 = 0.0;                   // seconds, [0, 0.6]
  int sample_rate = kSampleRate;
  std::size_t max_rir_length = 12000;  // samples

  // Throws ConfigError when any invariant is violated.
  void Validate() const;
};

// Uniform wall pressure-reflection coefficient from Eyring's formula.
double EyringReflectionCoefficient(const RoomSpec& room);

// Uniform wall pressure-reflection coefficient used by GenerateRirSet: the
// Eyring value refined so the image-method decay of the room measures
// `rt60` under Schroeder integration.
double ReflectionCoefficient(const RoomSpec& room);

struct RirSet {
  RoomSpec room;
  std::uint64_t seed = 0;
  // h[emitter * num_receivers + receiver]; all paths share one length.
  std::vector<Waveform> h;

  const Waveform& Path(int emitter, int receiver) const;
  Waveform& Path(int emitter, int receiver);
  int num_emitters() const {
    return static_cast<int>(room.source_positions.size());
  }
  int num_receivers() const {
    return static_cast<int>(room.mic_positions.size());
  }
  // Number of devices (loudspeaker + microphone pairs).
  int devices() const { return num_receivers(); }

  // Index of the direct-path tap, round(distance / c * fs).
  std::size_t DirectDelay(int emitter, int receiver) const;
};

// Image-method synthesis. All paths are scaled by a common factor so that
// the direct-path tap of h11 (loudspeaker 1 -> mic 1) is exactly 1. Each
// response is cut where the energy decay passes -60 dB (one RT60 after the
// latest direct path), capped at room.max_rir_length. The result depends only
// on (room, seed); the seed is carried for provenance.
RirSet GenerateRirSet(const RoomSpec& room, std::uint64_t seed);

// Allen & Berkley's second-order high-pass: a zero at DC, a zero and a
// double pole at exp(-2 pi corner / fs). The first sample passes unchanged.
// Throws ConfigError unless corner_hz is in (0, fs/2).
Waveform HighPass(WaveformView x, double corner_hz,
                  int sample_rate = kSampleRate);

// Second-order Butterworth low-pass (bilinear, double zero at fs/2).
// Throws ConfigError unless corner_hz is in (0, fs/2).
Waveform LowPass(WaveformView x, double corner_hz,
                 int sample_rate = kSampleRate);

// Random but plausible meeting-room geometry for the standard layout, drawn
// deterministically from `seed`.
RoomSpec RandomRoom(std::uint64_t seed, double rt60);

struct Nonlinearity {
  enum class Kind { kIdentity, kHardClip, kSigmoidal };

  Kind kind = Kind::kIdentity;
  double clip_threshold = 0.8;  // linear amplitude
  double sigmoid_gain = 2.0;    // `a` in 2 / (1 + exp(-a x)) - 1

  static Nonlinearity Identity() { return {}; }
  static Nonlinearity HardClip(double threshold = 0.8) {
    return {Kind::kHardClip, threshold, 2.0};
  }
  static Nonlinearity Sigmoidal(double gain = 2.0) {
    return {Kind::kSigmoidal, 0.8, gain};
  }

  double operator()(double v) const;
  // d NL / dx at 0.
  double SmallSignalSlope() const;
};

std::string ToString(Nonlinearity::Kind kind);
Nonlinearity::Kind NonlinearityKindFromString(const std::string& name);

// out[n] = nl(gain * x[n]).
Waveform ApplyNonlinearity(WaveformView x, const Nonlinearity& nl,
                           double gain);

// Linear convolution truncated to x.size(). Uses a direct sum for short
// filters and FFT otherwise. Throws DegenerateInputError on empty input.
Waveform Convolve(WaveformView x, WaveformView h);

// Schroeder backward integration with a least-squares line on the
// -5..-35 dB part of the decay, extrapolated to -60 dB. A response with a
// single nonzero tap has no decay and measures 0. Throws UnmeasurableError
// if the fit segment is shorter than 10 ms or never reaches -35 dB, and
// DegenerateInputError if h has no energy.
double MeasureRt60(WaveformView h, int sample_rate = kSampleRate);

// Single-file container: text header terminated by an "end" line, then each
// path as little-endian float32 in emitter-major order.
void WriteRirSet(const std::filesystem::path& path, const RirSet& set);
RirSet ReadRirSet(const std::filesystem::path& path);

}  // namespace howlsim

#endif  // HOWLSIM_ACOUSTIC_CORE_H_
