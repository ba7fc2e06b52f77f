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

#include "howlsim/spectral.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "howlsim/binary_io.h"
#include "howlsim/error.h"
#include "howlsim/fft.h"

namespace howlsim {
namespace {

constexpr double kWindowFloor = 1e-4;
constexpr char kMatMagic[] = "HOWLSIM-MAT";
constexpr int kMatVersion = 1;

// First-order recursive average started from `init`.
class Smoother {
 public:
  explicit Smoother(Complex init) : state_(init) {}
  Complex Push(Complex v) {
    state_ = kFeatureSmoothing * state_ + (1.0 - kFeatureSmoothing) * v;
    return state_;
  }
  Complex state() const { return state_; }

 private:
  Complex state_;
};

// Smoothed power per (frame, bin) of one channel, plus the value before the
// first frame (index 0 of the result holds frame -1).
std::vector<double> SmoothedPower(const Spectrogram& x) {
  const std::size_t frames = x.frames();
  const std::size_t bins = x.bins();
  std::vector<double> out((frames + 1) * bins, 0.0);
  for (std::size_t f = 0; f < bins; ++f) {
    double mean = 0.0;
    for (std::size_t t = 0; t < frames; ++t) mean += std::norm(x.at(t, f));
    mean /= static_cast<double>(frames);
    Smoother s(mean);
    out[f] = mean;
    for (std::size_t t = 0; t < frames; ++t) {
      out[(t + 1) * bins + f] = s.Push(std::norm(x.at(t, f))).real();
    }
  }
  return out;
}

void EmitRatio(Complex num, double denom_sq, double* magnitude,
               double* cosine) {
  if (!(denom_sq > 0.0)) {
    *magnitude = 0.0;
    *cosine = 0.0;
    return;
  }
  const Complex r = num / std::sqrt(denom_sq);
  const double mag = std::abs(r);
  *magnitude = mag;
  *cosine = mag > 0.0 ? r.real() / mag : 0.0;
}

}  // namespace

void FrameConfig::Validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw GeometryError("fft_size must be even and >= 2");
  }
  if (frame_len == 0 || frame_len > fft_size) {
    throw GeometryError("frame_len must be in [1, fft_size]");
  }
  if (frame_len % 2 != 0 || hop != frame_len / 2) {
    throw GeometryError("hop must equal frame_len / 2");
  }
}

std::string ToString(WindowKind kind) {
  switch (kind) {
    case WindowKind::kSqrtHann:
      return "sqrt_hann";
  }
  return "sqrt_hann";
}

std::vector<double> AnalysisWindow(const FrameConfig& cfg) {
  std::vector<double> w(cfg.frame_len);
  const double n = static_cast<double>(cfg.frame_len);
  for (std::size_t i = 0; i < cfg.frame_len; ++i) {
    w[i] = std::sin(std::numbers::pi * static_cast<double>(i) / n);
  }
  return w;
}

Spectrogram::Spectrogram(std::size_t frames, const FrameConfig& cfg,
                         std::size_t origin_len)
    : frames_(frames),
      cfg_(cfg),
      origin_len_(origin_len),
      data_(frames * cfg.bins()) {}

std::size_t FrameCount(std::size_t len, const FrameConfig& cfg) {
  if (len < cfg.frame_len) return 0;
  return 1 + (len - cfg.frame_len + cfg.hop - 1) / cfg.hop;
}

Spectrogram Stft(WaveformView x, const FrameConfig& cfg) {
  cfg.Validate();
  if (x.size() < cfg.frame_len) {
    throw GeometryError("Stft: input shorter than one frame");
  }
  const std::size_t frames = FrameCount(x.size(), cfg);
  Spectrogram spec(frames, cfg, x.size());
  const std::vector<double> window = AnalysisWindow(cfg);
  RealFft fft(cfg.fft_size);
  std::vector<double> buf(cfg.fft_size);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t start = t * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len && start + i < x.size(); ++i) {
      buf[i] = x[start + i] * window[i];
    }
    fft.Forward(buf, spec.frame(t));
  }
  return spec;
}

Waveform Istft(const Spectrogram& spec) {
  const FrameConfig& cfg = spec.cfg();
  cfg.Validate();
  if (spec.frames() == 0 ||
      spec.data().size() != spec.frames() * cfg.bins()) {
    throw GeometryError("Istft: malformed spectrogram");
  }
  if (FrameCount(spec.origin_len(), cfg) != spec.frames()) {
    throw GeometryError("Istft: frame count does not match origin_len");
  }
  const std::vector<double> window = AnalysisWindow(cfg);
  const std::size_t padded = (spec.frames() - 1) * cfg.hop + cfg.frame_len;
  std::vector<double> acc(padded, 0.0);
  std::vector<double> norm(padded, 0.0);
  RealFft fft(cfg.fft_size);
  std::vector<double> buf(cfg.fft_size);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    fft.Inverse(spec.frame(t), buf);
    const std::size_t start = t * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      acc[start + i] += buf[i] * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  Waveform out(spec.origin_len());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = norm[i] > kWindowFloor ? acc[i] / norm[i] : acc[i];
  }
  return out;
}

std::vector<TapOffset> DefaultTapGeometry() {
  return {{0, 0}, {1, 0}, {2, 0}};
}

DeepFilter::DeepFilter(std::size_t frames, std::size_t bins,
                       std::vector<TapOffset> taps)
    : frames_(frames),
      bins_(bins),
      taps_(std::move(taps)),
      coeffs_(frames * bins * taps_.size()) {
  if (taps_.empty()) throw GeometryError("DeepFilter: no taps");
}

DeepFilter DeepFilter::Identity(std::size_t frames, std::size_t bins,
                                std::vector<TapOffset> taps) {
  DeepFilter f(frames, bins, std::move(taps));
  const auto center = std::find(f.taps_.begin(), f.taps_.end(), TapOffset{});
  if (center == f.taps_.end()) {
    throw GeometryError("DeepFilter::Identity: geometry lacks a (0, 0) tap");
  }
  const std::size_t k =
      static_cast<std::size_t>(std::distance(f.taps_.begin(), center));
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t b = 0; b < bins; ++b) f.coeff(t, b, k) = 1.0;
  }
  return f;
}

Spectrogram DeepFilterApply(const Spectrogram& spec, const DeepFilter& filter) {
  if (spec.frames() != filter.frames() || spec.bins() != filter.bins()) {
    throw GeometryError("DeepFilterApply: filter and spectrogram disagree");
  }
  Spectrogram out(spec.frames(), spec.cfg(), spec.origin_len());
  const auto frames = static_cast<std::ptrdiff_t>(spec.frames());
  const auto bins = static_cast<std::ptrdiff_t>(spec.bins());
  const auto& taps = filter.taps();
  for (std::ptrdiff_t t = 0; t < frames; ++t) {
    for (std::ptrdiff_t f = 0; f < bins; ++f) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < taps.size(); ++k) {
        const std::ptrdiff_t st = t - taps[k].dt;
        const std::ptrdiff_t sf = f - taps[k].df;
        if (st < 0 || st >= frames || sf < 0 || sf >= bins) continue;
        acc += filter.coeff(static_cast<std::size_t>(t),
                            static_cast<std::size_t>(f), k) *
               spec.at(static_cast<std::size_t>(st),
                       static_cast<std::size_t>(sf));
      }
      out.at(static_cast<std::size_t>(t), static_cast<std::size_t>(f)) = acc;
    }
  }
  return out;
}

std::size_t FeatureDims(std::size_t channels, std::size_t bins) {
  if (channels == 0) return 0;
  return bins * (channels + 2 * channels + 2 * (channels - 1));
}

std::string FeatureLayoutTag(std::size_t channels) {
  return "features-v" + std::to_string(kFeatureLayoutVersion) + "-C" +
         std::to_string(channels);
}

FeatureMatrix Features(std::span<const Spectrogram> channels) {
  if (channels.empty()) throw GeometryError("Features: no channels");
  const Spectrogram& y = channels.front();
  for (const Spectrogram& c : channels) {
    if (!c.SameGeometry(y)) {
      throw GeometryError("Features: channels are not frame-aligned");
    }
  }
  const std::size_t frames = y.frames();
  const std::size_t bins = y.bins();
  const std::size_t nch = channels.size();
  FeatureMatrix m;
  m.rows = frames;
  m.cols = FeatureDims(nch, bins);
  m.data.assign(m.rows * m.cols, 0.0);
  if (frames == 0) return m;

  // LPS block.
  const double log_eps = std::log(kLpsEpsilon);
  for (std::size_t c = 0; c < nch; ++c) {
    const Spectrogram& x = channels[c];
    const bool silent = std::all_of(x.data().begin(), x.data().end(),
                                    [](const Complex& v) { return v == 0.0; });
    const std::size_t col0 = c * bins;
    for (std::size_t f = 0; f < bins; ++f) {
      if (silent) {
        for (std::size_t t = 0; t < frames; ++t) m.at(t, col0 + f) = log_eps;
        continue;
      }
      double mean = 0.0;
      for (std::size_t t = 0; t < frames; ++t) {
        const double v = std::log(std::norm(x.at(t, f)) + kLpsEpsilon);
        m.at(t, col0 + f) = v;
        mean += v;
      }
      mean /= static_cast<double>(frames);
      double var = 0.0;
      for (std::size_t t = 0; t < frames; ++t) {
        const double d = m.at(t, col0 + f) - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / static_cast<double>(frames));
      for (std::size_t t = 0; t < frames; ++t) {
        const double d = m.at(t, col0 + f) - mean;
        m.at(t, col0 + f) = sd > 1e-8 ? d / sd : d;
      }
    }
  }

  std::vector<std::vector<double>> power;
  power.reserve(nch);
  for (const Spectrogram& x : channels) power.push_back(SmoothedPower(x));

  // Inter-frame correlation block.
  const std::size_t tcor0 = nch * bins;
  for (std::size_t c = 0; c < nch; ++c) {
    const Spectrogram& x = channels[c];
    const std::vector<double>& p = power[c];
    const std::size_t col_mag = tcor0 + 2 * c * bins;
    const std::size_t col_cos = col_mag + bins;
    for (std::size_t f = 0; f < bins; ++f) {
      Complex init = 0.0;
      if (frames > 1) {
        for (std::size_t t = 1; t < frames; ++t) {
          init += x.at(t, f) * std::conj(x.at(t - 1, f));
        }
        init /= static_cast<double>(frames - 1);
      }
      Smoother s(init);
      for (std::size_t t = 0; t < frames; ++t) {
        const Complex prev = t > 0 ? x.at(t - 1, f) : Complex{};
        const Complex phi = s.Push(x.at(t, f) * std::conj(prev));
        // p[(t + 1) * bins] is frame t, p[t * bins] is frame t - 1.
        EmitRatio(phi, p[(t + 1) * bins + f] * p[t * bins + f],
                  &m.at(t, col_mag + f), &m.at(t, col_cos + f));
      }
    }
  }

  // Channel covariance block.
  const std::size_t ccov0 = tcor0 + 2 * nch * bins;
  for (std::size_t r = 1; r < nch; ++r) {
    const Spectrogram& ref = channels[r];
    const std::size_t col_mag = ccov0 + 2 * (r - 1) * bins;
    const std::size_t col_cos = col_mag + bins;
    for (std::size_t f = 0; f < bins; ++f) {
      Complex init = 0.0;
      for (std::size_t t = 0; t < frames; ++t) {
        init += y.at(t, f) * std::conj(ref.at(t, f));
      }
      init /= static_cast<double>(frames);
      Smoother s(init);
      for (std::size_t t = 0; t < frames; ++t) {
        const Complex phi = s.Push(y.at(t, f) * std::conj(ref.at(t, f)));
        EmitRatio(phi,
                  power[0][(t + 1) * bins + f] * power[r][(t + 1) * bins + f],
                  &m.at(t, col_mag + f), &m.at(t, col_cos + f));
      }
    }
  }
  return m;
}

namespace {

struct MatHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string dtype;
  FrameConfig cfg;
  std::size_t origin_len = 0;
  std::string layout;
};

void WriteMatHeader(std::ostream& os, const MatHeader& h) {
  os << kMatMagic << ' ' << kMatVersion << '\n'
     << "rows " << h.rows << '\n'
     << "cols " << h.cols << '\n'
     << "dtype " << h.dtype << '\n'
     << "fft_size " << h.cfg.fft_size << '\n'
     << "frame_len " << h.cfg.frame_len << '\n'
     << "hop " << h.cfg.hop << '\n'
     << "window " << ToString(h.cfg.window) << '\n'
     << "origin_len " << h.origin_len << '\n'
     << "layout " << h.layout << '\n'
     << "end\n";
}

MatHeader ReadMatHeader(std::istream& is, const std::filesystem::path& path) {
  MatHeader h;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty file: " + path.string());
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kMatMagic || version != kMatVersion) {
      throw IoError("not a howlsim matrix file: " + path.string());
    }
  }
  bool ended = false;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "rows") ss >> h.rows;
    else if (key == "cols") ss >> h.cols;
    else if (key == "dtype") ss >> h.dtype;
    else if (key == "fft_size") ss >> h.cfg.fft_size;
    else if (key == "frame_len") ss >> h.cfg.frame_len;
    else if (key == "hop") ss >> h.cfg.hop;
    else if (key == "window") {
      std::string w;
      ss >> w;
      if (w != "sqrt_hann") throw IoError("unknown window: " + w);
    } else if (key == "origin_len") ss >> h.origin_len;
    else if (key == "layout") ss >> h.layout;
    else throw IoError("unknown header key '" + key + "' in " + path.string());
  }
  if (!ended) throw IoError("truncated header: " + path.string());
  return h;
}

}  // namespace

void WriteFeatureMatrix(const std::filesystem::path& path,
                        const FeatureMatrix& m, const FrameConfig& cfg,
                        std::size_t origin_len, const std::string& layout) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  WriteMatHeader(os, {m.rows, m.cols, "f32", cfg, origin_len, layout});
  for (double v : m.data) binary::PutF32(os, static_cast<float>(v));
  if (!os) throw IoError("write failed: " + path.string());
}

FeatureMatrix ReadFeatureMatrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  const MatHeader h = ReadMatHeader(is, path);
  if (h.dtype != "f32") throw IoError("expected f32 payload: " + path.string());
  FeatureMatrix m;
  m.rows = h.rows;
  m.cols = h.cols;
  m.data.resize(h.rows * h.cols);
  for (double& v : m.data) v = binary::GetF32(is);
  return m;
}

void WriteSpectrogram(const std::filesystem::path& path,
                      const Spectrogram& spec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  WriteMatHeader(os, {spec.frames(), spec.bins(), "c64", spec.cfg(),
                      spec.origin_len(), "spectrogram"});
  for (const Complex& v : spec.data()) {
    binary::PutF32(os, static_cast<float>(v.real()));
    binary::PutF32(os, static_cast<float>(v.imag()));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

Spectrogram ReadSpectrogram(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  const MatHeader h = ReadMatHeader(is, path);
  if (h.dtype != "c64") throw IoError("expected c64 payload: " + path.string());
  h.cfg.Validate();
  if (h.cols != h.cfg.bins()) throw IoError("bin count mismatch");
  Spectrogram spec(h.rows, h.cfg, h.origin_len);
  for (Complex& v : spec.data()) {
    const double re = binary::GetF32(is);
    const double im = binary::GetF32(is);
    v = {re, im};
  }
  return spec;
}

}  // namespace howlsim
