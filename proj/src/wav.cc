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

#include "asc/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "asc/error.h"
#include "asc/io_binary.h"

namespace asc {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

uint16_t read_u16_le(std::istream& is, const std::string& what) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw DataError("truncated WAV while reading " + what);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

}  // namespace

PcmSignal load_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV file: " + path);

  expect_magic(is, "RIFF", path);
  read_u32_le(is, "RIFF size");
  expect_magic(is, "WAVE", path);

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<char> data;

  // Walk chunks; anything other than fmt/data is skipped (chunk sizes are
  // padded to even byte counts).
  while (true) {
    char id[4];
    is.read(id, 4);
    if (is.eof()) break;
    if (!is) throw DataError("truncated chunk header in " + path);
    const uint32_t size = read_u32_le(is, "chunk size");
    const std::string chunk_id(id, 4);
    if (chunk_id == "fmt ") {
      if (size < 16) throw DataError("fmt chunk too small in " + path);
      fmt.format = read_u16_le(is, "format tag");
      fmt.channels = read_u16_le(is, "channel count");
      fmt.sample_rate = read_u32_le(is, "sample rate");
      read_u32_le(is, "byte rate");
      read_u16_le(is, "block align");
      fmt.bits_per_sample = read_u16_le(is, "bits per sample");
      is.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (chunk_id == "data") {
      data.resize(size);
      is.read(data.data(), size);
      if (!is) throw DataError("truncated data chunk in " + path);
      if (size & 1) is.seekg(1, std::ios::cur);
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
      if (!is) throw DataError("truncated chunk \"" + chunk_id + "\" in " + path);
    }
  }

  if (!have_fmt) throw DataError("missing fmt chunk in " + path);
  if (data.empty()) throw DataError("missing or empty data chunk in " + path);

  if (fmt.sample_rate != kRequiredSampleRate) {
    throw DataError("unsupported sample rate " +
                    std::to_string(fmt.sample_rate) + " in " + path +
                    " (expected 16000; resample before use)");
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw DataError("unsupported channel count " +
                    std::to_string(fmt.channels) + " in " + path);
  }

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
  const bool f32 = fmt.format == kFormatIeeeFloat && fmt.bits_per_sample == 32;
  if (!pcm16 && !f32) {
    throw DataError("unsupported encoding (format " +
                    std::to_string(fmt.format) + ", " +
                    std::to_string(fmt.bits_per_sample) + " bits) in " + path);
  }

  const size_t bytes_per_sample = pcm16 ? 2 : 4;
  const size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data.size() % frame_bytes != 0) {
    throw DataError("data chunk size not a multiple of the frame size in " +
                    path);
  }
  const size_t num_frames = data.size() / frame_bytes;

  PcmSignal signal;
  signal.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  signal.samples.resize(num_frames);

  const unsigned char* raw = reinterpret_cast<const unsigned char*>(data.data());
  for (size_t n = 0; n < num_frames; ++n) {
    double acc = 0.0;
    for (int c = 0; c < fmt.channels; ++c) {
      const unsigned char* p = raw + n * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        const int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
        acc += v / 32768.0;
      } else {
        const uint32_t bits = static_cast<uint32_t>(p[0]) | (p[1] << 8) |
                              (static_cast<uint32_t>(p[2]) << 16) |
                              (static_cast<uint32_t>(p[3]) << 24);
        acc += std::bit_cast<float>(bits);
      }
    }
    const float v = static_cast<float>(acc / fmt.channels);
    if (!std::isfinite(v)) {
      throw DataError("non-finite sample at index " + std::to_string(n) +
                      " in " + path);
    }
    signal.samples[n] = v;
  }
  return signal;
}

void write_wav_pcm16(const std::string& path,
                     const std::vector<float>& samples, int sample_rate_hz) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write WAV file: " + path);

  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  write_magic(os, "RIFF");
  write_u32_le(os, 36 + data_bytes);
  write_magic(os, "WAVE");

  write_magic(os, "fmt ");
  write_u32_le(os, 16);
  os.put(1).put(0);  // PCM
  os.put(1).put(0);  // mono
  write_u32_le(os, static_cast<uint32_t>(sample_rate_hz));
  write_u32_le(os, static_cast<uint32_t>(sample_rate_hz * 2));
  os.put(2).put(0);  // block align
  os.put(16).put(0);

  write_magic(os, "data");
  write_u32_le(os, data_bytes);
  for (float s : samples) {
    const float clipped = std::clamp(s, -1.0f, 1.0f);
    const int16_t v = static_cast<int16_t>(std::lrint(clipped * 32767.0f));
    os.put(static_cast<char>(v & 0xff));
    os.put(static_cast<char>((v >> 8) & 0xff));
  }
  if (!os) throw DataError("failed writing WAV file: " + path);
}

}  // namespace asc
