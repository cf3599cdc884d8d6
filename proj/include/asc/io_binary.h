// Copyright 2026 The Hieracoustic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASC_IO_BINARY_H_
#define ASC_IO_BINARY_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "asc/error.h"

// Little-endian primitives used by the feature and model file formats.

namespace asc {

inline void write_u32_le(std::ostream& os, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline uint32_t read_u32_le(std::istream& is, const std::string& what) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw DataError("truncated file while reading " + what);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

inline void write_u8(std::ostream& os, uint8_t v) {
  os.put(static_cast<char>(v));
}

inline uint8_t read_u8(std::istream& is, const std::string& what) {
  const int c = is.get();
  if (c == EOF) throw DataError("truncated file while reading " + what);
  return static_cast<uint8_t>(c);
}

inline void write_f32_le(std::ostream& os, float v) {
  write_u32_le(os, std::bit_cast<uint32_t>(v));
}

inline float read_f32_le(std::istream& is, const std::string& what) {
  return std::bit_cast<float>(read_u32_le(is, what));
}

inline void write_magic(std::ostream& os, const char magic[4]) {
  os.write(magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4],
                         const std::string& what) {
  char b[4];
  is.read(b, 4);
  if (!is || b[0] != magic[0] || b[1] != magic[1] || b[2] != magic[2] ||
      b[3] != magic[3]) {
    throw DataError("bad magic in " + what + " (expected \"" +
                    std::string(magic, 4) + "\")");
  }
}

}  // namespace asc

#endif  // ASC_IO_BINARY_H_
