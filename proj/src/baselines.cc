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


#include "howlsim/baselines.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "howlsim/error.h"

namespace howlsim {
namespace {

double MeanSquare(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / x.size();
}

double DbToPower(double db) { return std::pow(10.0, db / 10.0); }

double Dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

constexpr double kRefPeakDecay = 0.999;

}  // namespace

void NlmsConfig::Validate() const {
  if (taps == 0) throw ConfigError("NLMS needs at least one tap");
  if (!(mu >= 0.0 && mu < 2.0)) throw ConfigError("NLMS mu must be in [0, 2)");
  if (!(delta > 0.0)) throw ConfigError("NLMS delta must be > 0");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    throw ConfigError("NLMS preemphasis must be in [0, 1)");
  }
  if (gate && (gate_history == 0 || !(gate_percentile >= 0.0) ||
               !(gate_percentile < 1.0))) {
    throw ConfigError("NLMS gate needs history > 0 and percentile in [0, 1)");
  }
}

Nlms::Nlms(const NlmsConfig& cfg)
    : cfg_(cfg),
      w_(cfg.taps, 0.0),
      buf_(2 * cfg.taps, 0.0),
      pbuf_(2 * cfg.taps, 0.0) {
  cfg_.Validate();
}

double Nlms::TapNorm() const {
  double s = 0.0;
  for (double v : w_) s += v * v;
  return std::sqrt(s);
}

bool Nlms::GateOpen(std::span<const double> mic,
                    std::span<const double> ref) {
  const double pr = MeanSquare(ref);
  const double pm = MeanSquare(mic);
  ref_peak_ = std::max(pr, ref_peak_ * kRefPeakDecay);
  if (!(pr > 0.0) || pr < ref_peak_ * DbToPower(cfg_.ref_floor_db)) {
    return false;
  }
  const double ratio = pm / pr;
  if (ratios_.size() < cfg_.gate_history) {
    ratios_.push_back(ratio);
  } else {
    ratios_[ratio_next_] = ratio;
    ratio_next_ = (ratio_next_ + 1) % ratios_.size();
  }
  std::vector<double> sorted = ratios_;
  const auto k = static_cast<std::size_t>(cfg_.gate_percentile *
                                          static_cast<double>(sorted.size()));
  std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
  return ratio <= sorted[k] * DbToPower(cfg_.gate_db);
}

void Nlms::Process(std::span<const double> mic, std::span<const double> ref,
                   std::span<double> out) {
  if (mic.size() != ref.size() || mic.size() != out.size()) {
    throw ContractError("Nlms: frame sizes differ");
  }
  adapted_ = cfg_.mu > 0.0 && (!cfg_.gate || GateOpen(mic, ref));
  Run(mic, ref, out, adapted_);
}

void Nlms::Run(std::span<const double> mic, std::span<const double> ref,
               std::span<double> out, bool adapt) {
  const std::size_t taps = cfg_.taps;
  const double pe = cfg_.preemphasis;
  for (std::size_t i = 0; i < mic.size(); ++i) {
    pos_ = (pos_ + taps - 1) % taps;
    const double x = ref[i];
    buf_[pos_] = x;
    buf_[pos_ + taps] = x;
    // Adaptation sees the pre-emphasized pair; the filter is the same since
    // the pre-filter commutes with the echo path.
    const double xp = x - pe * ref_prev_;
    const double dp = mic[i] - pe * mic_prev_;
    ref_prev_ = x;
    mic_prev_ = mic[i];
    energy_ += xp * xp - pbuf_[pos_] * pbuf_[pos_];
    pbuf_[pos_] = xp;
    pbuf_[pos_ + taps] = xp;
    if (pos_ == 0) {
      energy_ = 0.0;
      for (std::size_t k = 0; k < taps; ++k) energy_ += pbuf_[k] * pbuf_[k];
    }
    energy_ = std::max(energy_, 0.0);

    const double* xv = buf_.data() + pos_;
    const double e = mic[i] - Dot(w_.data(), xv, taps);
    out[i] = e;
    if (adapt) {
      const double* pv = pbuf_.data() + pos_;
      const double ep = pe == 0.0 ? e : dp - Dot(w_.data(), pv, taps);
      const double g = cfg_.mu * ep / (energy_ + cfg_.delta);
      if (g != 0.0) {
        for (std::size_t j = 0; j < taps; ++j) w_[j] += g * pv[j];
      }
    }
  }
}

void HowlingDetectorConfig::Validate() const {
  if (persistence < 1) throw ConfigError("persistence must be >= 1");
  if (std::isnan(papr_db)) {
    throw ConfigError("detector thresholds must not be NaN");
  }
}

HowlingDetector::HowlingDetector(std::size_t bins,
                                 const HowlingDetectorConfig& cfg)
    : cfg_(cfg), run_(bins, 0) {
  cfg_.Validate();
}

void HowlingDetector::Reset() { std::fill(run_.begin(), run_.end(), 0); }

void HowlingDetector::ClearBin(std::size_t bin) {
  if (bin < run_.size()) run_[bin] = 0;
}

std::vector<std::size_t> HowlingDetector::Update(
    std::span<const Complex> frame) {
  if (frame.size() != run_.size()) {
    throw GeometryError("HowlingDetector: bin count mismatch");
  }
  const std::size_t bins = frame.size();
  std::vector<double> power(bins);
  double mean = 0.0;
  for (std::size_t f = 0; f < bins; ++f) {
    power[f] = std::norm(frame[f]);
    mean += power[f];
  }
  mean /= static_cast<double>(bins);
  std::vector<std::size_t> found;
  if (!(mean > 0.0)) {
    Reset();
    return found;
  }
  const double threshold = mean * DbToPower(cfg_.papr_db);
  for (std::size_t f = 0; f < bins; ++f) {
    const bool peaky = f > 0 && power[f] >= threshold;
    run_[f] = peaky ? run_[f] + 1 : 0;
  }
  for (std::size_t f = 1; f < bins; ++f) {
    const bool local_max = power[f] >= power[f - 1] &&
                           (f + 1 == bins || power[f] >= power[f + 1]);
    if (run_[f] >= cfg_.persistence && local_max) {
      found.push_back(f);
    }
  }
  return found;
}

NotchBank::Biquad NotchBank::Design(const Notch& n) {
  const double w0 = 2.0 * std::numbers::pi * n.center_hz / kSampleRate;
  const double cw = std::cos(w0);
  const double rp = std::exp(-std::numbers::pi * n.bandwidth_hz / kSampleRate);
  const double rz = 1.0 - (1.0 - rp) * std::pow(10.0, -n.depth_db / 20.0);
  // Unity at whichever band edge (DC or Nyquist) lies farther away.
  const double e = w0 < std::numbers::pi / 2.0 ? -1.0 : 1.0;
  const double g = (1.0 - 2.0 * e * rp * cw + rp * rp) /
                   (1.0 - 2.0 * e * rz * cw + rz * rz);
  Biquad b;
  b.b0 = g;
  b.b1 = -2.0 * rz * cw * g;
  b.b2 = rz * rz * g;
  b.a1 = -2.0 * rp * cw;
  b.a2 = rp * rp;
  return b;
}

void NotchBank::Add(const Notch& notch) {
  if (!(notch.center_hz > 0.0 && notch.center_hz < kSampleRate / 2.0)) {
    throw ConfigError("notch center must be in (0, fs/2)");
  }
  if (!(notch.bandwidth_hz > 0.0) || !(notch.depth_db > 0.0)) {
    throw ConfigError("notch bandwidth and depth must be > 0");
  }
  for (std::size_t i = 0; i < notches_.size(); ++i) {
    Notch& n = notches_[i];
    if (std::abs(n.center_hz - notch.center_hz) <= 0.5 * n.bandwidth_hz) {
      n.depth_db = std::min(kMaxDepthDb, n.depth_db + 6.0);
      const Biquad old = filters_[i];
      filters_[i] = Design(n);
      filters_[i].z1 = old.z1;
      filters_[i].z2 = old.z2;
      return;
    }
  }
  if (notches_.size() == kMaxNotches) {
    notches_.erase(notches_.begin());
    filters_.erase(filters_.begin());
  }
  notches_.push_back(notch);
  filters_.push_back(Design(notch));
}

void NotchBank::Clear() {
  notches_.clear();
  filters_.clear();
}

void NotchBank::Apply(std::span<double> frame) {
  for (Biquad& f : filters_) {
    for (double& v : frame) {
      const double y = f.b0 * v + f.z1;
      f.z1 = f.b1 * v - f.a1 * y + f.z2;
      f.z2 = f.b2 * v - f.a2 * y;
      v = y;
    }
  }
}

double NotchBank::Response(double hz) const {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * hz / kSampleRate);
  const std::complex<double> z2 = z1 * z1;
  double mag = 1.0;
  for (const Biquad& f : filters_) {
    mag *= std::abs((f.b0 + f.b1 * z1 + f.b2 * z2) /
                    (1.0 + f.a1 * z1 + f.a2 * z2));
  }
  return mag;
}

void PassThroughSuppressor::Process(const FrameContext& ctx,
                                    std::span<double> out) {
  std::copy(ctx.mic.begin(), ctx.mic.end(), out.begin());
}

void NlmsSuppressor::Process(const FrameContext& ctx, std::span<double> out) {
  nlms_.Process(ctx.mic, ctx.x1, out);
}

NlmsNotchSuppressor::NlmsNotchSuppressor(const NlmsConfig& nlms,
                                         const HowlingDetectorConfig& det)
    : nlms_(nlms),
      detector_(FrameConfig{}.bins(), det),
      window_(AnalysisWindow(FrameConfig{})),
      history_(FrameConfig{}.frame_len, 0.0),
      fft_(FrameConfig{}.fft_size),
      scratch_(FrameConfig{}.fft_size, 0.0),
      spec_(FrameConfig{}.bins()) {}

void NlmsNotchSuppressor::Process(const FrameContext& ctx,
                                  std::span<double> out) {
  nlms_.Process(ctx.mic, ctx.x1, out);
  bank_.Apply(out);

  const std::size_t hop = out.size();
  std::copy(history_.begin() + static_cast<std::ptrdiff_t>(hop),
            history_.end(), history_.begin());
  std::copy(out.begin(), out.end(),
            history_.end() - static_cast<std::ptrdiff_t>(hop));
  for (std::size_t i = 0; i < history_.size(); ++i) {
    scratch_[i] = history_[i] * window_[i];
  }
  fft_.Forward(scratch_, spec_);
  for (std::size_t bin : detector_.Update(spec_)) {
    // The spectrum mirrors about Nyquist, so the last bin's right neighbor
    // equals its left one.
    const std::size_t right = bin + 1 < spec_.size() ? bin + 1 : bin - 1;
    const double a = std::log(std::norm(spec_[bin - 1]) + 1e-300);
    const double b = std::log(std::norm(spec_[bin]) + 1e-300);
    const double c = std::log(std::norm(spec_[right]) + 1e-300);
    const double denom = a - 2.0 * b + c;
    const double offset = denom < 0.0 ? std::clamp(0.5 * (a - c) / denom,
                                                   -0.5, 0.5)
                                      : 0.0;
    const double hz = (static_cast<double>(bin) + offset) * kSampleRate /
                      static_cast<double>(fft_.size());
    const Notch proto;
    bank_.Add(Notch{std::min(hz, kSampleRate / 2.0 - proto.bandwidth_hz / 4.0)});
    detector_.ClearBin(bin);
  }
}

void OracleSuppressor::Process(const FrameContext& ctx,
                               std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t t = ctx.start + i;
    out[i] = t < s1_.size() ? s1_[t] : 0.0;
  }
}

std::unique_ptr<FrameSuppressor> MakeSuppressor(const std::string& name,
                                                const SceneSignals& scene) {
  if (name == "passthrough") return std::make_unique<PassThroughSuppressor>();
  if (name == "nlms") return std::make_unique<NlmsSuppressor>();
  if (name == "nlms+notch") return std::make_unique<NlmsNotchSuppressor>();
  if (name == "oracle") return std::make_unique<OracleSuppressor>(scene.s1);
  throw ConfigError("unknown suppressor: " + name);
}

Waveform RunOffline(FrameSuppressor& suppressor, const SceneSignals& scene) {
  if (suppressor.frame_size() != kLoopHop) {
    throw ContractError("suppressor frame size must be " +
                        std::to_string(kLoopHop));
  }
  const std::size_t n = scene.y1.size();
  for (const Waveform* w : {&scene.x1, &scene.x, &scene.x21}) {
    if (w->size() != n) throw GeometryError("scene signals differ in length");
  }
  Waveform result(n, 0.0);
  std::vector<double> mic(kLoopHop), x1(kLoopHop), x(kLoopHop),
      x21(kLoopHop), out(kLoopHop);
  for (std::size_t start = 0; start < n; start += kLoopHop) {
    const std::size_t len = std::min(kLoopHop, n - start);
    for (std::size_t i = 0; i < kLoopHop; ++i) {
      const bool in = i < len;
      mic[i] = in ? scene.y1[start + i] : 0.0;
      x1[i] = in ? scene.x1[start + i] : 0.0;
      x[i] = in ? scene.x[start + i] : 0.0;
      x21[i] = in ? scene.x21[start + i] : 0.0;
    }
    suppressor.Process(FrameContext{start, mic, x1, x, x21}, out);
    std::copy(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(len),
              result.begin() + static_cast<std::ptrdiff_t>(start));
  }
  return result;
}

}  // namespace howlsim
