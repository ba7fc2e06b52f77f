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

#include "howlsim/acoustic_core.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "howlsim/binary_io.h"
#include "howlsim/error.h"
#include "howlsim/fft.h"
#include "howlsim/random.h"

namespace howlsim {
namespace {

constexpr double kMaxRt60 = 0.6;
constexpr double kMinSourceDistance = 0.01;
constexpr std::size_t kDirectConvolutionTaps = 64;
constexpr char kRirMagic[] = "HOWLSIM-RIR";
constexpr int kRirVersion = 1;

bool StrictlyInside(const Vec3& p, const Vec3& dims) {
  return p.x > 0.0 && p.y > 0.0 && p.z > 0.0 && p.x < dims.x &&
         p.y < dims.y && p.z < dims.z;
}

std::size_t DelaySamples(double distance, int sample_rate) {
  return static_cast<std::size_t>(
      std::llround(distance / kSpeedOfSound * sample_rate));
}

Vec3 RandomPoint(Rng& rng, const Vec3& dims, double margin, double z_lo,
                 double z_hi) {
  return {rng.Uniform(margin, dims.x - margin),
          rng.Uniform(margin, dims.y - margin), rng.Uniform(z_lo, z_hi)};
}

// Point at horizontal distance `dist` from `center` in a random direction,
// retried until it lands inside the room with `margin` to spare.
Vec3 PlaceNear(Rng& rng, const Vec3& center, const Vec3& dims, double dist_lo,
               double dist_hi, double z, double margin) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    const double dist = rng.Uniform(dist_lo, dist_hi);
    const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 p{center.x + dist * std::cos(angle),
                 center.y + dist * std::sin(angle), z};
    if (p.x > margin && p.y > margin && p.x < dims.x - margin &&
        p.y < dims.y - margin) {
      return p;
    }
  }
  throw ConfigError("RandomRoom: could not place device inside room");
}

}  // namespace

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void RoomSpec::Validate() const {
  if (!(dimensions.x > 0.0 && dimensions.y > 0.0 && dimensions.z > 0.0)) {
    throw ConfigError("room dimensions must be positive");
  }
  if (sample_rate != kSampleRate) {
    throw ConfigError("sample rate must be 16000 Hz");
  }
  if (!(rt60 >= 0.0 && rt60 <= kMaxRt60)) {
    throw ConfigError("rt60 must lie in [0, 0.6] s");
  }
  if (source_positions.empty() || mic_positions.empty()) {
    throw ConfigError("room needs at least one emitter and one receiver");
  }
  if (max_rir_length == 0) throw ConfigError("max_rir_length must be > 0");
  for (const Vec3& p : source_positions) {
    if (!StrictlyInside(p, dimensions)) {
      throw ConfigError("emitter position outside room");
    }
  }
  for (const Vec3& p : mic_positions) {
    if (!StrictlyInside(p, dimensions)) {
      throw ConfigError("microphone position outside room");
    }
  }
  for (const Vec3& s : source_positions) {
    for (const Vec3& m : mic_positions) {
      if (Distance(s, m) < kMinSourceDistance) {
        throw ConfigError("emitter and microphone coincide");
      }
    }
  }
}

double EyringReflectionCoefficient(const RoomSpec& room) {
  if (room.rt60 <= 0.0) return 0.0;
  const Vec3& d = room.dimensions;
  const double volume = d.x * d.y * d.z;
  const double surface = 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
  // T = 24 ln(10) V / (-c S ln(1 - alpha)), beta = sqrt(1 - alpha).
  const double log_one_minus_alpha =
      -24.0 * std::numbers::ln10 * volume /
      (kSpeedOfSound * surface * room.rt60);
  return std::sqrt(std::exp(log_one_minus_alpha));
}

namespace {

// Calls fn(distance, reflection_count) for every image of `s` seen from `m`
// closer than d_max (Allen & Berkley lattice, uniform walls).
template <typename Fn>
void ForEachImage(const Vec3& s, const Vec3& m, const Vec3& dims, double d_max,
                  Fn&& fn) {
  const int nx = static_cast<int>(std::ceil(d_max / (2.0 * dims.x))) + 1;
  const int ny = static_cast<int>(std::ceil(d_max / (2.0 * dims.y))) + 1;
  const int nz = static_cast<int>(std::ceil(d_max / (2.0 * dims.z))) + 1;
  const double d_max2 = d_max * d_max;
  for (int px = 0; px <= 1; ++px) {
    for (int mx = -nx; mx <= nx; ++mx) {
      const double dx = (1 - 2 * px) * s.x + 2.0 * mx * dims.x - m.x;
      if (std::abs(dx) > d_max) continue;
      const int rx = std::abs(mx - px) + std::abs(mx);
      for (int py = 0; py <= 1; ++py) {
        for (int my = -ny; my <= ny; ++my) {
          const double dy = (1 - 2 * py) * s.y + 2.0 * my * dims.y - m.y;
          const double dxy2 = dx * dx + dy * dy;
          if (dxy2 > d_max2) continue;
          const int ry = std::abs(my - py) + std::abs(my);
          for (int pz = 0; pz <= 1; ++pz) {
            for (int mz = -nz; mz <= nz; ++mz) {
              const double dz = (1 - 2 * pz) * s.z + 2.0 * mz * dims.z - m.z;
              const double d2 = dxy2 + dz * dz;
              if (d2 > d_max2) continue;
              fn(std::sqrt(d2), rx + ry + std::abs(mz - pz) + std::abs(mz));
            }
          }
        }
      }
    }
  }
}

int MaxReflectionOrder(const Vec3& dims, double d_max) {
  const int nx = static_cast<int>(std::ceil(d_max / (2.0 * dims.x))) + 1;
  const int ny = static_cast<int>(std::ceil(d_max / (2.0 * dims.y))) + 1;
  const int nz = static_cast<int>(std::ceil(d_max / (2.0 * dims.z))) + 1;
  return 2 * (nx + ny + nz) + 6;
}

}  // namespace

double ReflectionCoefficient(const RoomSpec& room) {
  room.Validate();
  const double eyring = EyringReflectionCoefficient(room);
  if (eyring == 0.0) return 0.0;

  // With integer-sample delays, late images pile up coherently in the same
  // taps and the tail decays more slowly than the diffuse-field formula
  // predicts. The coefficient is therefore bisected until a trial synthesis
  // of the talker -> mic 1 path measures `rt60`. Images are enumerated once;
  // each trial only reweights them.
  struct Image {
    std::size_t delay;
    int order;
    double amplitude;
  };
  const Vec3& s = room.source_positions.back();
  const Vec3& m = room.mic_positions.front();
  const std::size_t direct = DelaySamples(Distance(s, m), room.sample_rate);
  const std::size_t length =
      direct + static_cast<std::size_t>(std::ceil(room.rt60 * room.sample_rate)) +
      1;
  const double d_max = (static_cast<double>(length) - 0.5) * kSpeedOfSound /
                       room.sample_rate;
  std::vector<Image> images;
  int max_order = 0;
  ForEachImage(s, m, room.dimensions, d_max, [&](double dist, int order) {
    const std::size_t n = DelaySamples(dist, room.sample_rate);
    if (n >= length) return;
    images.push_back({n, order, 1.0 / (4.0 * std::numbers::pi * dist)});
    max_order = std::max(max_order, order);
  });

  std::vector<double> beta_pow(static_cast<std::size_t>(max_order) + 1);
  Waveform trial(length);
  // NaN when the trial decay is too short to measure.
  auto measured = [&](double beta) {
    for (int k = 0; k <= max_order; ++k) {
      beta_pow[static_cast<std::size_t>(k)] = std::pow(beta, k);
    }
    std::fill(trial.begin(), trial.end(), 0.0);
    for (const Image& im : images) {
      trial[im.delay] +=
          im.amplitude * beta_pow[static_cast<std::size_t>(im.order)];
    }
    try {
      return MeasureRt60(trial, room.sample_rate);
    } catch (const UnmeasurableError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  const double at_eyring = measured(eyring);
  if (std::isnan(at_eyring) || at_eyring <= room.rt60) return eyring;
  double lo = 0.0;
  double hi = eyring;
  for (int it = 0; it < 24; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t = measured(mid);
    if (std::isnan(t) || t < room.rt60) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const Waveform& RirSet::Path(int emitter, int receiver) const {
  return h.at(static_cast<std::size_t>(emitter * num_receivers() + receiver));
}

Waveform& RirSet::Path(int emitter, int receiver) {
  return h.at(static_cast<std::size_t>(emitter * num_receivers() + receiver));
}

std::size_t RirSet::DirectDelay(int emitter, int receiver) const {
  return DelaySamples(
      Distance(room.source_positions.at(static_cast<std::size_t>(emitter)),
               room.mic_positions.at(static_cast<std::size_t>(receiver))),
      room.sample_rate);
}

RirSet GenerateRirSet(const RoomSpec& room, std::uint64_t seed) {
  room.Validate();
  const double beta = ReflectionCoefficient(room);
  if (!(beta < 1.0)) {
    throw ConfigError("rt60 implies a wall reflection coefficient >= 1");
  }

  RirSet set;
  set.room = room;
  set.seed = seed;

  std::size_t max_direct = 0;
  for (const Vec3& s : room.source_positions) {
    for (const Vec3& m : room.mic_positions) {
      max_direct = std::max(max_direct, DelaySamples(Distance(s, m),
                                                     room.sample_rate));
    }
  }
  const std::size_t decay_len =
      static_cast<std::size_t>(std::ceil(room.rt60 * room.sample_rate));
  const std::size_t length =
      std::min(room.max_rir_length, max_direct + decay_len + 1);
  if (length <= max_direct) {
    throw ConfigError("max_rir_length shorter than a direct-path delay");
  }

  // Delay in samples < length  <=>  distance < d_max.
  const double d_max = (static_cast<double>(length) - 0.5) * kSpeedOfSound /
                       room.sample_rate;
  const int max_order = MaxReflectionOrder(room.dimensions, d_max);
  std::vector<double> beta_pow(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) {
    beta_pow[static_cast<std::size_t>(k)] = std::pow(beta, k);
  }

  set.h.reserve(room.source_positions.size() * room.mic_positions.size());
  for (const Vec3& s : room.source_positions) {
    for (const Vec3& m : room.mic_positions) {
      Waveform h(length, 0.0);
      ForEachImage(s, m, room.dimensions, d_max, [&](double dist, int order) {
        const std::size_t n = DelaySamples(dist, room.sample_rate);
        const double gain = beta_pow[static_cast<std::size_t>(order)];
        if (n >= length || gain == 0.0) return;
        h[n] += gain / (4.0 * std::numbers::pi * dist);
      });
      set.h.push_back(std::move(h));
    }
  }

  // Common scale: direct tap of loudspeaker 1 -> mic 1 becomes 1.
  const double d11 =
      Distance(room.source_positions[kLoudspeaker1], room.mic_positions[kMic1]);
  const double scale = 4.0 * std::numbers::pi * d11;
  for (Waveform& h : set.h) {
    for (double& v : h) v *= scale;
  }
  return set;
}

Waveform HighPass(WaveformView x, double corner_hz, int sample_rate) {
  if (!(corner_hz > 0.0 && corner_hz < sample_rate / 2.0)) {
    throw ConfigError("high-pass corner must be in (0, fs/2)");
  }
  const double w = 2.0 * std::numbers::pi * corner_hz / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  Waveform out(x.size());
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + x[n];
    out[n] = y0 + a1 * y1 + r1 * y2;
  }
  return out;
}

Waveform LowPass(WaveformView x, double corner_hz, int sample_rate) {
  if (!(corner_hz > 0.0 && corner_hz < sample_rate / 2.0)) {
    throw ConfigError("low-pass corner must be in (0, fs/2)");
  }
  const double w = 2.0 * std::numbers::pi * corner_hz / sample_rate;
  const double alpha = std::sin(w) / std::numbers::sqrt2;  // Q = 1/sqrt(2)
  const double cw = std::cos(w);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 - cw) / (2.0 * a0);
  const double b1 = (1.0 - cw) / a0;
  const double a1 = -2.0 * cw / a0;
  const double a2 = (1.0 - alpha) / a0;
  Waveform out(x.size());
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double y = b0 * x[n] + z1;
    z1 = b1 * x[n] - a1 * y + z2;
    z2 = b0 * x[n] - a2 * y;
    out[n] = y;
  }
  return out;
}

RoomSpec RandomRoom(std::uint64_t seed, double rt60) {
  Rng rng(MixSeed(seed, 0x524f4f4d));  // "ROOM"
  RoomSpec room;
  room.dimensions = {rng.Uniform(4.0, 8.0), rng.Uniform(3.0, 6.0),
                     rng.Uniform(2.5, 3.5)};
  room.rt60 = rt60;

  const double table_z = rng.Uniform(0.7, 1.1);
  const Vec3 device1 = RandomPoint(rng, room.dimensions, 0.8, table_z, table_z);
  const Vec3 device2 =
      PlaceNear(rng, device1, room.dimensions, 1.0, 3.0, table_z, 0.5);
  const Vec3 talker = PlaceNear(rng, device1, room.dimensions, 0.5, 1.5,
                                rng.Uniform(1.1, 1.7), 0.3);

  // Each device carries its loudspeaker 10 cm from its microphone.
  auto speaker_of = [&](const Vec3& mic) {
    const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    return Vec3{mic.x + 0.1 * std::cos(angle), mic.y + 0.1 * std::sin(angle),
                mic.z};
  };
  room.source_positions = {speaker_of(device1), speaker_of(device2), talker};
  room.mic_positions = {device1, device2};

  const double diag = std::sqrt(room.dimensions.x * room.dimensions.x +
                                room.dimensions.y * room.dimensions.y +
                                room.dimensions.z * room.dimensions.z);
  room.max_rir_length = static_cast<std::size_t>(
      std::ceil((diag / kSpeedOfSound + kMaxRt60) * kSampleRate)) + 1;
  room.Validate();
  return room;
}

double Nonlinearity::operator()(double v) const {
  switch (kind) {
    case Kind::kIdentity:
      return v;
    case Kind::kHardClip:
      return std::clamp(v, -clip_threshold, clip_threshold);
    case Kind::kSigmoidal:
      return 2.0 / (1.0 + std::exp(-sigmoid_gain * v)) - 1.0;
  }
  return v;
}

double Nonlinearity::SmallSignalSlope() const {
  switch (kind) {
    case Kind::kIdentity:
      return 1.0;
    case Kind::kHardClip:
      return clip_threshold > 0.0 ? 1.0 : 0.0;
    case Kind::kSigmoidal:
      return sigmoid_gain / 2.0;
  }
  return 1.0;
}

std::string ToString(Nonlinearity::Kind kind) {
  switch (kind) {
    case Nonlinearity::Kind::kIdentity:
      return "identity";
    case Nonlinearity::Kind::kHardClip:
      return "hard_clip";
    case Nonlinearity::Kind::kSigmoidal:
      return "sigmoidal";
  }
  return "identity";
}

Nonlinearity::Kind NonlinearityKindFromString(const std::string& name) {
  if (name == "identity") return Nonlinearity::Kind::kIdentity;
  if (name == "hard_clip") return Nonlinearity::Kind::kHardClip;
  if (name == "sigmoidal") return Nonlinearity::Kind::kSigmoidal;
  throw ConfigError("unknown nonlinearity: " + name);
}

Waveform ApplyNonlinearity(WaveformView x, const Nonlinearity& nl,
                           double gain) {
  Waveform out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [&](double v) { return nl(gain * v); });
  return out;
}

Waveform Convolve(WaveformView x, WaveformView h) {
  if (x.empty() || h.empty()) {
    throw DegenerateInputError("Convolve: empty input");
  }
  const std::size_t n = x.size();
  // Taps beyond the output length never contribute.
  const std::size_t taps = std::min(h.size(), n);
  Waveform out(n, 0.0);
  if (taps <= kDirectConvolutionTaps) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t kmax = std::min(taps - 1, i);
      double acc = 0.0;
      for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[i - k];
      out[i] = acc;
    }
    return out;
  }
  const std::size_t size = NextPow2(n + taps - 1);
  RealFft fft(size);
  std::vector<double> buf(size, 0.0);
  std::vector<std::complex<double>> xs(fft.bins());
  std::vector<std::complex<double>> hs(fft.bins());
  std::copy(x.begin(), x.end(), buf.begin());
  fft.Forward(buf, xs);
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(taps),
            buf.begin());
  fft.Forward(buf, hs);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  fft.Inverse(xs, buf);
  std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n),
            out.begin());
  return out;
}

double MeasureRt60(WaveformView h, int sample_rate) {
  double total = 0.0;
  std::size_t nonzero = 0;
  for (double v : h) {
    total += v * v;
    if (v != 0.0) ++nonzero;
  }
  if (!(total > 0.0)) throw DegenerateInputError("MeasureRt60: zero energy");
  if (nonzero == 1) return 0.0;

  // Energy decay curve in dB re total energy.
  std::vector<double> edc_db(h.size());
  double tail = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    tail += h[i] * h[i];
    edc_db[i] = tail > 0.0 ? 10.0 * std::log10(tail / total)
                           : -std::numeric_limits<double>::infinity();
  }
  std::size_t start = h.size();
  std::size_t stop = h.size();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (start == h.size() && edc_db[i] <= -5.0) start = i;
    if (edc_db[i] <= -35.0) {
      stop = i;
      break;
    }
  }
  if (start == h.size() || stop == h.size()) {
    throw UnmeasurableError("MeasureRt60: decay never reaches -35 dB");
  }
  if (static_cast<double>(stop - start) < 0.010 * sample_rate) {
    throw UnmeasurableError("MeasureRt60: decay segment shorter than 10 ms");
  }

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  double count = 0.0;
  for (std::size_t i = start; i <= stop; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    st += t;
    sy += edc_db[i];
    stt += t * t;
    sty += t * edc_db[i];
    count += 1.0;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  if (!(slope < 0.0)) {
    throw UnmeasurableError("MeasureRt60: non-decaying energy curve");
  }
  return -60.0 / slope;
}

void WriteRirSet(const std::filesystem::path& path, const RirSet& set) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const RoomSpec& r = set.room;
  std::ostringstream hdr;
  hdr << std::setprecision(17);
  hdr << kRirMagic << ' ' << kRirVersion << '\n';
  hdr << "sample_rate " << r.sample_rate << '\n';
  hdr << "J " << set.devices() << '\n';
  hdr << "seed " << set.seed << '\n';
  hdr << "dimensions " << r.dimensions.x << ' ' << r.dimensions.y << ' '
      << r.dimensions.z << '\n';
  hdr << "rt60 " << r.rt60 << '\n';
  hdr << "max_rir_length " << r.max_rir_length << '\n';
  hdr << "emitters " << r.source_positions.size() << '\n';
  for (std::size_t i = 0; i < r.source_positions.size(); ++i) {
    const Vec3& p = r.source_positions[i];
    hdr << "emitter " << i << ' ' << p.x << ' ' << p.y << ' ' << p.z << '\n';
  }
  hdr << "receivers " << r.mic_positions.size() << '\n';
  for (std::size_t i = 0; i < r.mic_positions.size(); ++i) {
    const Vec3& p = r.mic_positions[i];
    hdr << "receiver " << i << ' ' << p.x << ' ' << p.y << ' ' << p.z << '\n';
  }
  const std::size_t length = set.h.empty() ? 0 : set.h.front().size();
  hdr << "paths " << set.h.size() << '\n';
  hdr << "length " << length << '\n';
  hdr << "end\n";
  os << hdr.str();
  for (const Waveform& h : set.h) {
    if (h.size() != length) throw GeometryError("RIR paths differ in length");
    for (double v : h) binary::PutF32(os, static_cast<float>(v));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

RirSet ReadRirSet(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  auto next_line = [&]() {
    std::string line;
    if (!std::getline(is, line)) throw IoError("truncated RIR header");
    return std::istringstream(line);
  };
  auto expect_key = [](std::istringstream& ss, const char* key) {
    std::string k;
    ss >> k;
    if (k != key) {
      throw IoError(std::string("RIR header: expected '") + key + "', got '" +
                    k + "'");
    }
  };

  RirSet set;
  RoomSpec& r = set.room;
  {
    auto ss = next_line();
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kRirMagic || version != kRirVersion) {
      throw IoError("not a howlsim RIR file: " + path.string());
    }
  }
  int devices = 0;
  std::size_t emitters = 0, receivers = 0, paths = 0, length = 0;
  { auto ss = next_line(); expect_key(ss, "sample_rate"); ss >> r.sample_rate; }
  { auto ss = next_line(); expect_key(ss, "J"); ss >> devices; }
  { auto ss = next_line(); expect_key(ss, "seed"); ss >> set.seed; }
  {
    auto ss = next_line();
    expect_key(ss, "dimensions");
    ss >> r.dimensions.x >> r.dimensions.y >> r.dimensions.z;
  }
  { auto ss = next_line(); expect_key(ss, "rt60"); ss >> r.rt60; }
  {
    auto ss = next_line();
    expect_key(ss, "max_rir_length");
    ss >> r.max_rir_length;
  }
  { auto ss = next_line(); expect_key(ss, "emitters"); ss >> emitters; }
  for (std::size_t i = 0; i < emitters; ++i) {
    auto ss = next_line();
    expect_key(ss, "emitter");
    std::size_t idx = 0;
    Vec3 p;
    ss >> idx >> p.x >> p.y >> p.z;
    r.source_positions.push_back(p);
  }
  { auto ss = next_line(); expect_key(ss, "receivers"); ss >> receivers; }
  for (std::size_t i = 0; i < receivers; ++i) {
    auto ss = next_line();
    expect_key(ss, "receiver");
    std::size_t idx = 0;
    Vec3 p;
    ss >> idx >> p.x >> p.y >> p.z;
    r.mic_positions.push_back(p);
  }
  { auto ss = next_line(); expect_key(ss, "paths"); ss >> paths; }
  { auto ss = next_line(); expect_key(ss, "length"); ss >> length; }
  { auto ss = next_line(); expect_key(ss, "end"); }
  if (paths != emitters * receivers ||
      devices != static_cast<int>(receivers)) {
    throw IoError("RIR header: inconsistent path count");
  }
  set.h.assign(paths, Waveform(length, 0.0));
  for (Waveform& h : set.h) {
    for (double& v : h) v = binary::GetF32(is);
  }
  return set;
}

}  // namespace howlsim
