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

#ifndef HOWLSIM_BINARY_IO_H_
#define HOWLSIM_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "howlsim/error.h"

namespace howlsim::binary {

inline void PutU16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

inline void PutU32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void PutF32(std::ostream& os, float v) {
  PutU32(os, std::bit_cast<std::uint32_t>(v));
}

inline std::uint16_t GetU16(std::istream& is) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char*>(b), 2)) {
    throw IoError("unexpected end of stream");
  }
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t GetU32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw IoError("unexpected end of stream");
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline float GetF32(std::istream& is) {
  return std::bit_cast<float>(GetU32(is));
}

}  // namespace howlsim::binary

#endif  // HOWLSIM_BINARY_IO_H_
