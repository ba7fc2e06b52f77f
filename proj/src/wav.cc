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

#include "howlsim/wav.h"

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "howlsim/binary_io.h"
#include "howlsim/error.h"

namespace howlsim {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

std::string ReadTag(std::istream& is) {
  char tag[4];
  if (!is.read(tag, 4)) throw IoError("unexpected end of stream");
  return std::string(tag, 4);
}

double DecodeSample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      const std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
          (static_cast<std::uint32_t>(p[3]) << 24);
      return std::bit_cast<float>(u);
    }
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = (u << 8) | p[i];
    return std::bit_cast<double>(u);
  }
  switch (bits) {
    case 16:
      return static_cast<std::int16_t>(p[0] | (p[1] << 8)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      const std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                              (static_cast<std::uint32_t>(p[3]) << 24);
      return static_cast<std::int32_t>(u) / 2147483648.0;
    }
  }
}

}  // namespace

WavData ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  if (ReadTag(is) != "RIFF") throw IoError("not a RIFF file: " + path.string());
  binary::GetU32(is);
  if (ReadTag(is) != "WAVE") throw IoError("not a WAVE file: " + path.string());

  std::uint16_t format = 0;
  int channels = 0;
  int rate = 0;
  int bits = 0;
  bool have_fmt = false;
  while (true) {
    const std::string tag = ReadTag(is);
    const std::uint32_t size = binary::GetU32(is);
    if (tag == "fmt ") {
      if (size < 16) throw IoError("short fmt chunk: " + path.string());
      format = binary::GetU16(is);
      channels = binary::GetU16(is);
      rate = static_cast<int>(binary::GetU32(is));
      binary::GetU32(is);  // byte rate
      binary::GetU16(is);  // block align
      bits = binary::GetU16(is);
      std::uint32_t rest = size - 16;
      if (format == kFormatExtensible && rest >= 24) {
        binary::GetU16(is);  // cbSize
        binary::GetU16(is);  // valid bits
        binary::GetU32(is);  // channel mask
        format = binary::GetU16(is);
        rest -= 10;
      }
      is.ignore(rest + (size & 1));
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw IoError("data before fmt: " + path.string());
      const bool ok = (format == kFormatPcm &&
                       (bits == 16 || bits == 24 || bits == 32)) ||
                      (format == kFormatFloat && (bits == 32 || bits == 64));
      if (!ok || channels < 1) {
        throw IoError("unsupported WAV encoding: " + path.string());
      }
      const std::size_t width = static_cast<std::size_t>(bits / 8);
      const std::size_t frames = size / (width * channels);
      std::vector<unsigned char> raw(frames * width * channels);
      if (!is.read(reinterpret_cast<char*>(raw.data()),
                   static_cast<std::streamsize>(raw.size()))) {
        throw IoError("truncated data chunk: " + path.string());
      }
      WavData out;
      out.sample_rate = rate;
      out.channels = channels;
      out.samples.assign(channels, Waveform(frames));
      const unsigned char* p = raw.data();
      for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < channels; ++c, p += width) {
          out.samples[c][i] = DecodeSample(p, format, bits);
        }
      }
      return out;
    } else {
      is.ignore(size + (size & 1));
    }
  }
}

Waveform ReadMonoWav(const std::filesystem::path& path) {
  WavData w = ReadWav(path);
  if (w.sample_rate != kSampleRate || w.channels != 1) {
    throw IoError("expected 16 kHz mono: " + path.string());
  }
  return std::move(w.samples.front());
}

void WriteWav(const std::filesystem::path& path, WaveformView x,
              int sample_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(x.size() * 4);
  os.write("RIFF", 4);
  binary::PutU32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  binary::PutU32(os, 16);
  binary::PutU16(os, kFormatFloat);
  binary::PutU16(os, 1);
  binary::PutU32(os, static_cast<std::uint32_t>(sample_rate));
  binary::PutU32(os, static_cast<std::uint32_t>(sample_rate) * 4);
  binary::PutU16(os, 4);
  binary::PutU16(os, 32);
  os.write("data", 4);
  binary::PutU32(os, data_bytes);
  for (double v : x) binary::PutF32(os, static_cast<float>(v));
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace howlsim
