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

#ifndef ASC_WAV_H_
#define ASC_WAV_H_

#include <string>
#include <vector>

namespace asc {

constexpr int kRequiredSampleRate = 16000;

/// Mono 16 kHz signal with amplitudes in [-1, 1].
struct PcmSignal {
  std::vector<float> samples;
  int sample_rate_hz = kRequiredSampleRate;
};

/// Reads a RIFF/WAVE file: PCM 16-bit or IEEE-float 32-bit, 1 or 2 channels,
/// sample rate exactly 16 kHz (no resampling happens here). Stereo is
/// averaged to mono; 16-bit samples are scaled by 1/32768.
/// Throws DataError on malformed headers and unsupported encodings.
PcmSignal load_wav(const std::string& path);

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
void write_wav_pcm16(const std::string& path,
                     const std::vector<float>& samples, int sample_rate_hz);

}  // namespace asc

#endif  // ASC_WAV_H_
