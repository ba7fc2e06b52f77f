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

// Time-frequency engine: 512-point STFT with 32 ms frames and 16 ms hops,
// its overlap-add inverse, deep filtering, and the network input features.

#ifndef HOWLSIM_SPECTRAL_H_
#define HOWLSIM_SPECTRAL_H_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "howlsim/types.h"

namespace howlsim {

using Complex = std::complex<double>;

enum class WindowKind { kSqrtHann };

struct FrameConfig {
  std::size_t fft_size = 512;
  std::size_t frame_len = 512;  // 32 ms
  std::size_t hop = 256;        // 16 ms
  WindowKind window = WindowKind::kSqrtHann;

  std::size_t bins() const { return fft_size / 2 + 1; }
  // Throws GeometryError unless hop == frame_len / 2 and
  // frame_len <= fft_size (the sqrt-Hann pair is COLA only at 50% overlap).
  void Validate() const;

  bool operator==(const FrameConfig&) const = default;
};

std::string ToString(WindowKind kind);

// Periodic square-root Hann window; squares of frames spaced by hop sum to 1.
std::vector<double> AnalysisWindow(const FrameConfig& cfg);

// Complex spectrogram, frame-major: at(t, f) = data[t * bins + f].
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frames, const FrameConfig& cfg,
              std::size_t origin_len);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return cfg_.bins(); }
  const FrameConfig& cfg() const { return cfg_; }
  std::size_t origin_len() const { return origin_len_; }

  Complex& at(std::size_t t, std::size_t f) { return data_[t * bins() + f]; }
  const Complex& at(std::size_t t, std::size_t f) const {
    return data_[t * bins() + f];
  }
  std::span<Complex> frame(std::size_t t) {
    return {data_.data() + t * bins(), bins()};
  }
  std::span<const Complex> frame(std::size_t t) const {
    return {data_.data() + t * bins(), bins()};
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  bool SameGeometry(const Spectrogram& other) const {
    return frames_ == other.frames_ && cfg_ == other.cfg_;
  }

 private:
  std::size_t frames_ = 0;
  FrameConfig cfg_;
  std::size_t origin_len_ = 0;
  std::vector<Complex> data_;
};

// Number of frames for a signal of `len` samples: 1 + ceil((len - frame_len)
// / hop); the tail of the last frame is zero-padded.
std::size_t FrameCount(std::size_t len, const FrameConfig& cfg);

// Throws GeometryError if x is shorter than one frame.
Spectrogram Stft(WaveformView x, const FrameConfig& cfg = {});

// Weighted overlap-add inverse trimmed to origin_len. Samples are divided by
// the accumulated squared window wherever it exceeds 1e-4, so the round trip
// is exact away from the first few samples.
Waveform Istft(const Spectrogram& spec);

// Tap (dt, df) reads S(t - dt, f - df); neighbors outside the spectrogram
// read as zero.
struct TapOffset {
  int dt = 0;
  int df = 0;
  bool operator==(const TapOffset&) const = default;
};

// Default neighborhood: current frame and the two before it, same bin.
std::vector<TapOffset> DefaultTapGeometry();

// Complex filter per time-frequency cell: coeff(t, f, k) for tap k.
class DeepFilter {
 public:
  DeepFilter(std::size_t frames, std::size_t bins,
             std::vector<TapOffset> taps = DefaultTapGeometry());

  // Center tap 1, every other tap 0. Requires a (0, 0) tap.
  static DeepFilter Identity(std::size_t frames, std::size_t bins,
                             std::vector<TapOffset> taps =
                                 DefaultTapGeometry());

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  const std::vector<TapOffset>& taps() const { return taps_; }

  Complex& coeff(std::size_t t, std::size_t f, std::size_t k) {
    return coeffs_[(t * bins_ + f) * taps_.size() + k];
  }
  const Complex& coeff(std::size_t t, std::size_t f, std::size_t k) const {
    return coeffs_[(t * bins_ + f) * taps_.size() + k];
  }
  std::vector<Complex>& coeffs() { return coeffs_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }

 private:
  std::size_t frames_;
  std::size_t bins_;
  std::vector<TapOffset> taps_;
  std::vector<Complex> coeffs_;
};

// out(t, f) = sum_k F(t, f, k) * S(t - dt_k, f - df_k).
Spectrogram DeepFilterApply(const Spectrogram& spec, const DeepFilter& filter);

// ---------------------------------------------------------------------------
// Input features.
//
// For C aligned channels [Y, R1, ..., R_{C-1}] (microphone first) and
// K = 257 bins, each frame's feature row is laid out as:
//
//   LPS   C * K     per channel, bin-minor: log(|X|^2 + eps), normalized per
//                   bin by the utterance mean and standard deviation. An
//                   all-zero channel is emitted as the constant log(eps).
//   TCOR  2 * C * K per channel: |rho| (K values) then cos(arg rho) (K),
//                   rho = smoothed X(t) X*(t-1) normalized by the smoothed
//                   powers of both frames.
//   CCOV  2 * (C-1) * K  per reference r: |coh| (K) then cos(arg coh) (K),
//                   coh = smoothed Y R_r* normalized by the smoothed powers.
//
// Smoothing is first-order recursive with kFeatureSmoothing, started from
// the utterance-level averages (offline setting). Undefined ratios (zero
// power) are emitted as 0.
inline constexpr int kFeatureLayoutVersion = 1;
inline constexpr double kLpsEpsilon = 1e-12;
inline constexpr double kFeatureSmoothing = 0.99;

std::size_t FeatureDims(std::size_t channels, std::size_t bins = 257);
std::string FeatureLayoutTag(std::size_t channels);

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Throws GeometryError when the channels disagree in frame count or frame
// geometry, or fewer than one channel is given.
FeatureMatrix Features(std::span<const Spectrogram> channels);

// ---------------------------------------------------------------------------
// Feature-exchange files. A text header of "key value" lines closed by
// "end", followed by a little-endian payload: float32 for feature matrices,
// interleaved (re, im) float32 pairs for spectrograms.
//
//   HOWLSIM-MAT 1
//   rows <frames>
//   cols <dims or bins>
//   dtype f32 | c64
//   fft_size 512
//   frame_len 512
//   hop 256
//   window sqrt_hann
//   origin_len <samples>
//   layout <features-v1-C<channels> | spectrogram>
//   end
void WriteFeatureMatrix(const std::filesystem::path& path,
                        const FeatureMatrix& m, const FrameConfig& cfg,
                        std::size_t origin_len, const std::string& layout);
FeatureMatrix ReadFeatureMatrix(const std::filesystem::path& path);

void WriteSpectrogram(const std::filesystem::path& path,
                      const Spectrogram& spec);
Spectrogram ReadSpectrogram(const std::filesystem::path& path);

}  // namespace howlsim

#endif  // HOWLSIM_SPECTRAL_H_
