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


// Classical suppressors that run inside the closed loop: a time-domain NLMS
// echo canceller on the integrated reference x1, a peak-to-average howling
// detector and an adaptive bank of peaking notches.

#ifndef HOWLSIM_BASELINES_H_
#define HOWLSIM_BASELINES_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "howlsim/fft.h"
#include "howlsim/scene_sim.h"
#include "howlsim/spectral.h"

namespace howlsim {

struct NlmsConfig {
  std::size_t taps = 4096;  // 256 ms
  double mu = 0.5;
  double delta = 1e-6;
  // First-order pre-emphasis 1 - a z^-1 applied to both signals on the
  // adaptation path only; 0 gives the plain update.
  double preemphasis = 0.9;
  // Energy gate. The mic/reference power ratio of far-end-only frames is
  // the echo coupling; near-end speech raises it. Adaptation runs only on
  // frames whose ratio is within gate_db of the gate_percentile of the last
  // gate_history active frames, and whose reference is no more than
  // ref_floor_db below its running peak.
  bool gate = true;
  double gate_db = 0.5;
  double gate_percentile = 0.1;
  std::size_t gate_history = 125;  // 2 s of frames
  double ref_floor_db = -30.0;

  // Throws ConfigError unless mu in [0, 2), delta > 0 and taps > 0.
  void Validate() const;
};

class Nlms {
 public:
  explicit Nlms(const NlmsConfig& cfg = {});

  // out = mic - w * ref for one frame, updating w sample by sample when the
  // frame passes the gate.
  void Process(std::span<const double> mic, std::span<const double> ref,
               std::span<double> out);

  const std::vector<double>& taps() const { return w_; }
  const NlmsConfig& config() const { return cfg_; }
  double TapNorm() const;
  // Whether the last processed frame adapted.
  bool adapted() const { return adapted_; }

 private:
  bool GateOpen(std::span<const double> mic, std::span<const double> ref);
  void Run(std::span<const double> mic, std::span<const double> ref,
           std::span<double> out, bool adapt);

  NlmsConfig cfg_;
  std::vector<double> w_;
  std::vector<double> buf_;   // reference history, stored twice
  std::vector<double> pbuf_;  // pre-emphasized history, same layout
  std::size_t pos_ = 0;
  double energy_ = 0.0;       // sum of squares of pbuf_'s window
  double ref_prev_ = 0.0;
  double mic_prev_ = 0.0;
  std::vector<double> ratios_;  // ring of recent active-frame ratios
  std::size_t ratio_next_ = 0;

  double ref_peak_ = 0.0;
  bool adapted_ = false;
};

struct HowlingDetectorConfig {
  double papr_db = 10.0;
  int persistence = 8;  // frames

  // Throws ConfigError for persistence < 1 or a NaN threshold.
  void Validate() const;
};

// Keeps per-bin run lengths of frames where the bin's power exceeds the
// frame's mean bin power by papr_db. Candidates are local maxima whose run
// has lasted at least `persistence` frames. DC is ignored; the Nyquist bin
// only needs to top its left neighbor.
class HowlingDetector {
 public:
  explicit HowlingDetector(std::size_t bins = 257,
                           const HowlingDetectorConfig& cfg = {});

  std::vector<std::size_t> Update(std::span<const Complex> frame);
  // Restarts the run of one bin, e.g. after a notch was placed on it.
  void ClearBin(std::size_t bin);
  void Reset();

 private:
  HowlingDetectorConfig cfg_;
  std::vector<int> run_;
};

struct Notch {
  double center_hz = 0.0;
  double bandwidth_hz = 50.0;
  double depth_db = 20.0;
};

// Cascade of pole-zero notch biquads, at most kMaxNotches. Poles sit at
// radius exp(-pi bw / fs) and zeros close enough to the unit circle to give
// `depth_db` at the center. Unlike bilinear peaking designs, a notch close to
// fs/2 also attenuates the Nyquist frequency itself.
class NotchBank {
 public:
  static constexpr std::size_t kMaxNotches = 8;
  static constexpr double kMaxDepthDb = 40.0;

  // A center inside an existing notch's band deepens that notch by 6 dB
  // (up to kMaxDepthDb). Otherwise the notch is added, replacing the oldest
  // one when the bank is full. Throws ConfigError for centers outside
  // (0, fs/2) or non-positive bandwidth or depth.
  void Add(const Notch& notch);
  void Clear();

  // In-place filtering; filter states carry over between calls.
  void Apply(std::span<double> frame);

  const std::vector<Notch>& notches() const { return notches_; }
  // Magnitude response of the cascade at `hz`.
  double Response(double hz) const;

 private:
  struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0;
    double z2 = 0.0;
  };
  static Biquad Design(const Notch& n);

  std::vector<Notch> notches_;
  std::vector<Biquad> filters_;
};

class PassThroughSuppressor : public FrameSuppressor {
 public:
  std::string name() const override { return "passthrough"; }
  void Process(const FrameContext& ctx, std::span<double> out) override;
};

class NlmsSuppressor : public FrameSuppressor {
 public:
  explicit NlmsSuppressor(const NlmsConfig& cfg = {}) : nlms_(cfg) {}
  std::string name() const override { return "nlms"; }
  void Process(const FrameContext& ctx, std::span<double> out) override;
  const Nlms& nlms() const { return nlms_; }

 private:
  Nlms nlms_;
};

// NLMS followed by notches placed where the detector, looking at the
// notched output through a 512-sample window, finds persistent peaks.
class NlmsNotchSuppressor : public FrameSuppressor {
 public:
  explicit NlmsNotchSuppressor(const NlmsConfig& nlms = {},
                               const HowlingDetectorConfig& det = {});
  std::string name() const override { return "nlms+notch"; }
  void Process(const FrameContext& ctx, std::span<double> out) override;
  const NotchBank& bank() const { return bank_; }

 private:
  Nlms nlms_;
  HowlingDetector detector_;
  NotchBank bank_;
  FrameConfig frame_;
  std::vector<double> window_;
  std::vector<double> history_;  // last frame_len output samples
  RealFft fft_;
  std::vector<double> scratch_;
  std::vector<Complex> spec_;
};

// Replays the ground-truth near-end signal; latency 0.
class OracleSuppressor : public FrameSuppressor {
 public:
  explicit OracleSuppressor(Waveform s1) : s1_(std::move(s1)) {}
  std::string name() const override { return "oracle"; }
  void Process(const FrameContext& ctx, std::span<double> out) override;

 private:
  Waveform s1_;
};

// "passthrough", "nlms", "nlms+notch" or "oracle" (needs the scene's s1).
std::unique_ptr<FrameSuppressor> MakeSuppressor(const std::string& name,
                                                const SceneSignals& scene);

// Open-loop run over a recorded scene: the suppressor sees y1 as its
// microphone hop by hop and its output is returned with y1's length. Used to
// produce enhanced files for evaluation.
Waveform RunOffline(FrameSuppressor& suppressor, const SceneSignals& scene);

}  // namespace howlsim

#endif  // HOWLSIM_BASELINES_H_
