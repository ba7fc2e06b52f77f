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


#include "howlsim/scene_sim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "howlsim/error.h"
#include "howlsim/fft.h"
#include "howlsim/partitioned_convolver.h"
#include "howlsim/synth.h"
#include "howlsim/wav.h"

namespace howlsim {
namespace {

constexpr std::size_t kGrowthWindow = 1600;  // 100 ms
constexpr double kRail = 1.0;

double DbToAmplitude(double db) { return std::pow(10.0, db / 20.0); }

// Loops or cuts `x` to n samples; empty input yields silence.
Waveform FitLength(WaveformView x, std::size_t n) {
  Waveform out(n, 0.0);
  if (x.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i % x.size()];
  return out;
}

void Scale(Waveform& x, double k) {
  for (double& v : x) v *= k;
}

Waveform Add(WaveformView a, WaveformView b) {
  Waveform out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

void CheckRirs(const RirSet& rirs, const SceneConfig& cfg) {
  if (rirs.devices() != cfg.devices || rirs.num_emitters() != kNumEmitters ||
      rirs.h.size() != static_cast<std::size_t>(kNumEmitters * kNumReceivers)) {
    throw ConfigError("RIR set does not match the two-device scene layout");
  }
  for (const Waveform& h : rirs.h) {
    if (h.empty()) throw ConfigError("RIR set has an empty path");
  }
}

// Input to device 2's loudspeaker path: NL2(G2 (o(t - D) + x(t))).
Waveform LoudspeakerDrive(WaveformView delayed_src, WaveformView x,
                          std::size_t delay, const SceneConfig& cfg) {
  Waveform u(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double o = t >= delay ? delayed_src[t - delay] : 0.0;
    u[t] = cfg.nl2(cfg.g2 * (o + x[t]));
  }
  return u;
}

std::string NlString(const Nonlinearity& nl) {
  std::ostringstream ss;
  ss << std::setprecision(17) << ToString(nl.kind);
  if (nl.kind == Nonlinearity::Kind::kHardClip) ss << ' ' << nl.clip_threshold;
  if (nl.kind == Nonlinearity::Kind::kSigmoidal) ss << ' ' << nl.sigmoid_gain;
  return ss.str();
}

}  // namespace

void SceneConfig::Validate() const {
  if (devices != 2) throw ConfigError("only two-device scenes are supported");
  if (!(delta_t >= 0.1 && delta_t <= 0.3)) {
    throw ConfigError("delta_t must be in [0.1, 0.3] s");
  }
  if (!(sfr_db >= -20.0 && sfr_db <= 5.0)) {
    throw ConfigError("sfr_db must be in [-20, 5]");
  }
  if (!(snr_db >= -10.0 && snr_db <= 30.0)) {
    throw ConfigError("snr_db must be in [-10, 30]");
  }
  if (!(g1 >= 0.0) || !(g2 >= 0.0) || !std::isfinite(g1) ||
      !std::isfinite(g2)) {
    throw ConfigError("amplifier gains must be finite and >= 0");
  }
  for (double hz : {loudspeaker_highpass_hz, loudspeaker_lowpass_hz}) {
    if (!(hz >= 0.0 && hz < kSampleRate / 2.0)) {
      throw ConfigError("loudspeaker band limits must be in [0, fs/2)");
    }
  }
  if (!std::isfinite(x21_gain_db) || !std::isfinite(speech_level_dbfs)) {
    throw ConfigError("levels must be finite");
  }
}

std::size_t SceneConfig::DelaySamples() const {
  return static_cast<std::size_t>(std::lround(delta_t * kSampleRate));
}

double ScaleToSfr(WaveformView target, WaveformView feedback, double sfr_db) {
  const double et = Energy(target);
  const double ef = Energy(feedback);
  if (!(et > 0.0) || !(ef > 0.0)) {
    throw DegenerateInputError("ScaleToSfr: zero-energy input");
  }
  return std::sqrt(et / ef * std::pow(10.0, -sfr_db / 10.0));
}

double ScaleToSnr(WaveformView signal, WaveformView noise, double snr_db) {
  return ScaleToSfr(signal, noise, snr_db);
}

namespace {

Waveform LoudspeakerPath(WaveformView h, const SceneConfig& cfg) {
  Waveform out(h.begin(), h.end());
  if (cfg.loudspeaker_highpass_hz > 0.0) {
    out = HighPass(out, cfg.loudspeaker_highpass_hz);
  }
  if (cfg.loudspeaker_lowpass_hz > 0.0) {
    out = LowPass(out, cfg.loudspeaker_lowpass_hz);
  }
  return out;
}

}  // namespace

ScenePlan PrepareScene(WaveformView speech, WaveformView far,
                       WaveformView noise, const RirSet& rirs,
                       const SceneConfig& cfg) {
  cfg.Validate();
  CheckRirs(rirs, cfg);
  if (speech.size() < static_cast<std::size_t>(kSampleRate)) {
    throw ConfigError("speech must be at least 1 s long");
  }
  if (!(Energy(speech) > 0.0)) {
    throw DegenerateInputError("speech is all-zero");
  }
  const std::size_t n = speech.size();
  const std::size_t delay = cfg.DelaySamples();
  const double level = DbToAmplitude(cfg.speech_level_dbfs);

  ScenePlan plan;
  plan.cfg = cfg;
  SceneSignals& sig = plan.teacher;

  sig.s1 = Convolve(speech, rirs.Path(kTalker, kMic1));
  Waveform s2 = Convolve(speech, rirs.Path(kTalker, kMic2));
  const double s_rms = Rms(sig.s1);
  if (!(s_rms > 0.0)) throw DegenerateInputError("rendered speech is silent");
  Scale(sig.s1, level / s_rms);
  Scale(s2, level / s_rms);

  const double g21 = DbToAmplitude(cfg.x21_gain_db);
  sig.x21.assign(n, 0.0);
  for (std::size_t t = delay; t < n; ++t) sig.x21[t] = g21 * s2[t - delay];

  sig.x = FitLength(far, n);
  const double x_rms = Rms(sig.x);
  if (x_rms > 0.0) Scale(sig.x, level / x_rms);
  sig.x1 = Add(sig.x, sig.x21);

  const Waveform h11 = LoudspeakerPath(rirs.Path(kLoudspeaker1, kMic1), cfg);
  const Waveform h21 = LoudspeakerPath(rirs.Path(kLoudspeaker2, kMic1), cfg);
  sig.d11 = Convolve(ApplyNonlinearity(sig.x1, cfg.nl1, cfg.g1), h11);
  sig.d11_x = Convolve(ApplyNonlinearity(sig.x, cfg.nl1, cfg.g1), h11);
  sig.d11_s = Convolve(ApplyNonlinearity(sig.x21, cfg.nl1, cfg.g1), h11);

  const Waveform silence(n, 0.0);
  sig.d21 = Convolve(LoudspeakerDrive(sig.s1, sig.x, delay, cfg), h21);
  sig.d21_x = Convolve(LoudspeakerDrive(silence, sig.x, delay, cfg), h21);
  sig.d21_s = Convolve(LoudspeakerDrive(sig.s1, silence, delay, cfg), h21);

  const Waveform feedback = Add(sig.d11, sig.d21);
  plan.feedback_scale =
      Energy(feedback) > 0.0 ? ScaleToSfr(sig.s1, feedback, cfg.sfr_db) : 1.0;
  for (Waveform* w : {&sig.d11, &sig.d11_x, &sig.d11_s, &sig.d21, &sig.d21_x,
                      &sig.d21_s}) {
    Scale(*w, plan.feedback_scale);
  }
  plan.h11 = h11;
  plan.h21 = h21;
  Scale(plan.h11, plan.feedback_scale);
  Scale(plan.h21, plan.feedback_scale);

  const Waveform fitted_noise = FitLength(noise, n);
  sig.n1.assign(n, 0.0);
  if (Energy(fitted_noise) > 0.0) {
    Waveform signal = sig.s1;
    for (std::size_t t = 0; t < n; ++t) signal[t] += sig.d11[t] + sig.d21[t];
    plan.noise_scale = ScaleToSnr(signal, fitted_noise, cfg.snr_db);
    for (std::size_t t = 0; t < n; ++t) {
      sig.n1[t] = plan.noise_scale * fitted_noise[t];
    }
  }

  sig.y1.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    sig.y1[t] = sig.s1[t] + sig.n1[t] + sig.d11[t] + sig.d21[t];
  }
  return plan;
}

SceneSignals MixTeacherForced(WaveformView speech, WaveformView far,
                              WaveformView noise, const RirSet& rirs,
                              const SceneConfig& cfg) {
  return PrepareScene(speech, far, noise, rirs, cfg).teacher;
}

double LoopGain(const ScenePlan& plan) {
  const std::size_t size = 4 * NextPow2(plan.h21.size());
  RealFft fft(size);
  std::vector<double> buf(size, 0.0);
  std::copy(plan.h21.begin(), plan.h21.end(), buf.begin());
  std::vector<std::complex<double>> spec(fft.bins());
  fft.Forward(buf, spec);
  double peak = 0.0;
  for (const auto& v : spec) peak = std::max(peak, std::abs(v));
  return plan.cfg.g2 * std::abs(plan.cfg.nl2.SmallSignalSlope()) * peak;
}

void SetLoopGain(ScenePlan& plan, double gain) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) {
    throw ConfigError("loop gain must be finite and >= 0");
  }
  const double current = LoopGain(plan);
  if (!(current > 0.0)) {
    throw ConfigError("scene has no loop to scale (G2 or h21 is zero)");
  }
  const double k = gain / current;
  Scale(plan.h21, k);
  SceneSignals& sig = plan.teacher;
  Scale(sig.d21, k);
  Scale(sig.d21_x, k);
  Scale(sig.d21_s, k);
  for (std::size_t t = 0; t < sig.y1.size(); ++t) {
    sig.y1[t] = sig.s1[t] + sig.n1[t] + sig.d11[t] + sig.d21[t];
  }
}

ClosedLoopResult SimulateClosedLoop(const ScenePlan& plan,
                                    FrameSuppressor& suppressor) {
  if (suppressor.frame_size() != kLoopHop) {
    throw ContractError("suppressor frame size " +
                        std::to_string(suppressor.frame_size()) +
                        " != loop hop " + std::to_string(kLoopHop));
  }
  const SceneSignals& sig = plan.teacher;
  const SceneConfig& cfg = plan.cfg;
  const std::size_t n = sig.size();
  const std::size_t delay = cfg.DelaySamples();
  if (delay < kLoopHop) {
    throw ContractError("loop delay shorter than one hop");
  }

  ClosedLoopResult res;
  res.y1.assign(n, 0.0);
  res.out.assign(n, 0.0);
  PartitionedConvolver loop_path(plan.h21, kLoopHop);
  std::vector<double> drive(kLoopHop), fb(kLoopHop), out(kLoopHop);
  std::vector<double> mic(kLoopHop), x1(kLoopHop), x(kLoopHop),
      x21(kLoopHop);

  for (std::size_t start = 0; start < n; start += kLoopHop) {
    const std::size_t len = std::min(kLoopHop, n - start);
    // out[t - delay] is final for every t in this hop since delay >= hop.
    for (std::size_t i = 0; i < kLoopHop; ++i) {
      const std::size_t t = start + i;
      if (i >= len) {
        drive[i] = 0.0;
        continue;
      }
      const double o = t >= delay ? res.out[t - delay] : 0.0;
      drive[i] = cfg.nl2(cfg.g2 * (o + sig.x[t]));
    }
    loop_path.Process(drive, fb);
    std::fill(mic.begin(), mic.end(), 0.0);
    std::fill(x1.begin(), x1.end(), 0.0);
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(x21.begin(), x21.end(), 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t t = start + i;
      const double v = sig.s1[t] + sig.n1[t] + sig.d11[t] + fb[i];
      res.y1[t] = std::clamp(v, -kRail, kRail);
      mic[i] = res.y1[t];
      x1[i] = sig.x1[t];
      x[i] = sig.x[t];
      x21[i] = sig.x21[t];
    }
    FrameContext ctx{start, mic, x1, x, x21};
    suppressor.Process(ctx, out);
    std::copy(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(len),
              res.out.begin() + static_cast<std::ptrdiff_t>(start));
  }
  return res;
}

GrowthReport AnalyzeGrowth(WaveformView y1, WaveformView excitation,
                           double onset_db) {
  GrowthReport r;
  const std::size_t windows = y1.size() / kGrowthWindow;
  r.window_energy.resize(windows);
  bool railed = false;
  for (std::size_t w = 0; w < windows; ++w) {
    const auto seg = y1.subspan(w * kGrowthWindow, kGrowthWindow);
    r.window_energy[w] = Energy(seg);
    if (!railed) {
      for (double v : seg) {
        if (std::abs(v) >= kRail) {
          railed = true;
          r.rail_window = w;
          break;
        }
      }
    }
  }
  r.reached_rail = railed;
  double exc_max = 0.0;
  for (std::size_t w = 0; w + 1 <= excitation.size() / kGrowthWindow; ++w) {
    exc_max = std::max(
        exc_max, Energy(excitation.subspan(w * kGrowthWindow, kGrowthWindow)));
  }
  const double threshold = exc_max * std::pow(10.0, onset_db / 10.0);
  std::size_t onset = windows;
  for (std::size_t w = 0; w < windows; ++w) {
    if (r.window_energy[w] > threshold) {
      onset = w;
      break;
    }
  }
  r.onset_window = onset;
  if (!railed || onset > r.rail_window) return r;
  r.monotone = true;
  for (std::size_t w = onset + 1; w <= r.rail_window; ++w) {
    if (r.window_energy[w] < r.window_energy[w - 1]) {
      r.monotone = false;
      break;
    }
  }
  return r;
}

std::string SceneSidecar(const SceneConfig& cfg) {
  std::ostringstream ss;
  ss << std::setprecision(17);
  ss << "devices " << cfg.devices << '\n'
     << "delta_t " << cfg.delta_t << '\n'
     << "delay_samples " << cfg.DelaySamples() << '\n'
     << "g1 " << cfg.g1 << '\n'
     << "g2 " << cfg.g2 << '\n'
     << "nl1 " << NlString(cfg.nl1) << '\n'
     << "nl2 " << NlString(cfg.nl2) << '\n'
     << "sfr_db " << cfg.sfr_db << '\n'
     << "snr_db " << cfg.snr_db << '\n'
     << "seed " << cfg.seed << '\n'
     << "x21_render talker->mic2 delayed by delta_t\n"
     << "x21_gain_db " << cfg.x21_gain_db << '\n'
     << "speech_level_dbfs " << cfg.speech_level_dbfs << '\n'
     << "loudspeaker_highpass_hz " << cfg.loudspeaker_highpass_hz << '\n'
     << "loudspeaker_lowpass_hz " << cfg.loudspeaker_lowpass_hz << '\n';
  return ss.str();
}

void WriteSceneDir(const std::filesystem::path& dir, const SceneSignals& sig,
                   const SceneConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::pair<const char*, const Waveform*> files[] = {
      {"s1.wav", &sig.s1},       {"n1.wav", &sig.n1},
      {"x.wav", &sig.x},         {"x21.wav", &sig.x21},
      {"x1.wav", &sig.x1},       {"d11.wav", &sig.d11},
      {"d21.wav", &sig.d21},     {"d11_x.wav", &sig.d11_x},
      {"d11_s.wav", &sig.d11_s}, {"d21_x.wav", &sig.d21_x},
      {"d21_s.wav", &sig.d21_s}, {"y1.wav", &sig.y1},
  };
  for (const auto& [name, w] : files) WriteWav(dir / name, *w);
  std::ofstream os(dir / "scene.txt");
  os << SceneSidecar(cfg);
  if (!os) throw IoError("write failed: " + (dir / "scene.txt").string());
}

}  // namespace howlsim
