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


// Two-device scene assembly. Device 1 is the one whose microphone we
// enhance; device 2 sits in the same room and plays back device 1's
// processed output (delayed by the network) together with the far-end
// signal, closing the acoustic loop through h21.

#ifndef HOWLSIM_SCENE_SIM_H_
#define HOWLSIM_SCENE_SIM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "howlsim/acoustic_core.h"
#include "howlsim/types.h"

namespace howlsim {

inline constexpr std::size_t kLoopHop = 256;  // 16 ms

struct SceneConfig {
  int devices = 2;
  double delta_t = 0.2;  // s, one-way system delay
  double g1 = 1.0;       // device 1 amplifier gain
  double g2 = 1.0;       // device 2 amplifier gain
  Nonlinearity nl1;
  Nonlinearity nl2;
  double sfr_db = 0.0;
  double snr_db = 30.0;
  std::uint64_t seed = 0;
  // Level of device 2's pickup of the talker as replayed by device 1,
  // relative to s1.
  double x21_gain_db = -6.0;
  // RMS of s1 and of the far-end signal x.
  double speech_level_dbfs = -48.0;
  // Band limits of the loudspeaker and converter chain, applied to h11 and
  // h21 before use (0 disables either). Integer-delay image responses keep
  // full gain at 0 Hz and fs/2, where real transducers pass nothing; without
  // these the largest loop gain tends to sit at one of the two edges.
  double loudspeaker_highpass_hz = 100.0;
  double loudspeaker_lowpass_hz = 7000.0;

  // Throws ConfigError outside delta_t in [0.1, 0.3], sfr_db in [-20, 5],
  // snr_db in [-10, 30], gains < 0, devices != 2 or a band-limit corner
  // outside [0, fs/2).
  void Validate() const;
  std::size_t DelaySamples() const;
};

struct SceneSignals {
  Waveform s1;
  Waveform n1;
  Waveform x;
  Waveform x21;
  Waveform x1;
  Waveform d11;
  Waveform d21;
  Waveform d11_x;
  Waveform d11_s;
  Waveform d21_x;
  Waveform d21_s;
  Waveform y1;

  std::size_t size() const { return y1.size(); }
};

// Everything the teacher-forced mixer and the closed loop share: the
// labels, plus the mic-side paths with the feedback scale folded in.
struct ScenePlan {
  SceneConfig cfg;
  SceneSignals teacher;
  Waveform h11;  // effective loudspeaker 1 -> mic 1 path
  Waveform h21;  // effective loudspeaker 2 -> mic 1 path
  double feedback_scale = 1.0;
  double noise_scale = 0.0;
};

// Scale for `feedback` so that 10 log10(|target|^2 / |k feedback|^2) equals
// sfr_db. Throws DegenerateInputError if either has no energy.
double ScaleToSfr(WaveformView target, WaveformView feedback, double sfr_db);
// Same for noise against signal.
double ScaleToSnr(WaveformView signal, WaveformView noise, double snr_db);

// Builds the teacher-forced scene. `speech` is the dry near-end utterance
// (rendered into mic 1 and mic 2 through the talker paths); `far` and
// `noise` are looped or cut to its length and may be all-zero. Throws
// ConfigError when the RIR set does not match the two-device layout or the
// speech is shorter than 1 s, DegenerateInputError on silent speech.
ScenePlan PrepareScene(WaveformView speech, WaveformView far,
                       WaveformView noise, const RirSet& rirs,
                       const SceneConfig& cfg);

// y1 = s1 + n1 + d11 + NL2[(s1(t - dt) + x(t)) G2] * h21.
SceneSignals MixTeacherForced(WaveformView speech, WaveformView far,
                              WaveformView noise, const RirSet& rirs,
                              const SceneConfig& cfg);

// Peak magnitude over frequency of the open loop seen by a pass-through
// suppressor: G2 * NL2'(0) * |H21(f)|.
double LoopGain(const ScenePlan& plan);
// Rescales the effective h21 (and the d21 labels) to reach `gain`.
void SetLoopGain(ScenePlan& plan, double gain);

struct FrameContext {
  std::size_t start = 0;  // index of the first sample of the frame
  std::span<const double> mic;
  std::span<const double> x1;
  std::span<const double> x;
  std::span<const double> x21;
};

// Streaming processor driven by the closed loop, one hop at a time.
class FrameSuppressor {
 public:
  virtual ~FrameSuppressor() = default;
  virtual std::size_t frame_size() const { return kLoopHop; }
  // Declared processing latency in samples.
  virtual std::size_t latency() const { return 0; }
  virtual std::string name() const = 0;
  virtual void Process(const FrameContext& ctx, std::span<double> out) = 0;
};

struct ClosedLoopResult {
  Waveform y1;   // microphone, saturated at +/-1
  Waveform out;  // suppressor output sent to device 2
};

// Sample-accurate recursion: the suppressor output is delayed by
// round(delta_t fs), added to x, amplified by G2, shaped by NL2 and fed
// through h21 back into mic 1, on top of s1 + n1 + d11. Throws
// ContractError if the suppressor frame size differs from kLoopHop.
ClosedLoopResult SimulateClosedLoop(const ScenePlan& plan,
                                    FrameSuppressor& suppressor);

// Energy trajectory over consecutive 100 ms windows.
struct GrowthReport {
  std::vector<double> window_energy;
  bool reached_rail = false;
  std::size_t rail_window = 0;   // first window touching +/-1
  std::size_t onset_window = 0;  // first window of the howling build-up
  bool monotone = false;         // onset..rail non-decreasing
};

// `excitation` is the loop-free microphone signal (s1 + n1 + d11 + d21 of
// the teacher). Onset is the first window whose energy exceeds every
// excitation window by `onset_db`; from there energy must not decrease
// until the rail is reached.
GrowthReport AnalyzeGrowth(WaveformView y1, WaveformView excitation,
                           double onset_db = 10.0);

// Writes s1.wav ... y1.wav plus scene.txt with the configuration.
void WriteSceneDir(const std::filesystem::path& dir, const SceneSignals& sig,
                   const SceneConfig& cfg);
std::string SceneSidecar(const SceneConfig& cfg);

}  // namespace howlsim

#endif  // HOWLSIM_SCENE_SIM_H_
