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

#ifndef ASC_FEATURES_H_
#define ASC_FEATURES_H_

#include <string>
#include <vector>

#include "asc/mat.h"
#include "asc/wav.h"

namespace asc {

// Log-mel front end: 40 ms frames with 50% hop, Hamming window, 1024-point
// FFT power spectrum, 40 triangular mel filters, natural log with floor.

/// Floor applied before the log; every feature value is >= log(1e-10).
constexpr double kLogFloor = 1e-10;

enum class WindowKind { kHamming, kHann, kRectangular };

struct FramingConfig {
  int frame_length_samples = 640;  // 40 ms at 16 kHz
  int hop_samples = 320;           // 50% hop
  WindowKind window = WindowKind::kHamming;
  int fft_size = 1024;  // must be a power of two >= frame length

  /// Throws ConfigError if 0 < hop <= frame <= fft or the power-of-two
  /// requirement is violated.
  void validate() const;
};

/// Number of frames for a signal of `len` samples; requires len >= frame.
size_t frame_count(size_t len, int frame_length, int hop);

/// Slices the signal into overlapping frames and applies the window.
/// Returns an F x frame_length matrix. Throws DataError if the signal is
/// shorter than one frame.
Mat<float> frame_signal(const PcmSignal& signal, const FramingConfig& cfg);

/// Window coefficients of the given kind and length.
std::vector<double> make_window(WindowKind kind, int length);

/// One-sided power spectrum |X_k|^2, k = 0..fft_size/2, of a zero-padded
/// frame. The DFT is unnormalized, so summing the two-sided power equals
/// fft_size times the time-domain energy (Parseval).
std::vector<double> power_spectrum(std::span<const float> frame, int fft_size);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterBank {
  int num_filters = 0;
  Mat<float> filters;  // num_filters x (fft_size/2 + 1), peak-normalized rows
  std::vector<double> center_freqs_hz;  // strictly increasing
  double min_freq_hz = 0.0;
  double max_freq_hz = 0.0;
};

/// Triangular filters with centers uniformly spaced on the mel scale between
/// min_freq_hz and max_freq_hz. Each row is scaled so its maximum weight is
/// exactly 1. Throws ConfigError for an invalid frequency range or when a
/// filter would cover no FFT bin.
MelFilterBank build_mel_filterbank(const FramingConfig& cfg, int num_filters,
                                   double min_freq_hz, double max_freq_hz);

struct MelFeatureSequence {
  Mat<float> frames;  // T x num_filters log-mel energies
  std::string segment_id;
};

/// Full front end for one signal: framing, power spectrum, filterbank
/// projection, log with floor.
MelFeatureSequence extract_log_mel(const PcmSignal& signal,
                                   const FramingConfig& cfg,
                                   const MelFilterBank& fb);

/// Concatenates `context` consecutive frames centered on each frame, with
/// edge indices clamped, so the output has as many rows as the input.
/// context must be odd. Output is T x (context * dim).
Mat<float> stack_context(const Mat<float>& features, int context = 11);

/// Per-dimension mean and population standard deviation. Held in double so
/// downstream checks do not inherit float rounding; the on-disk form is f32.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at kStddevFloor

  /// Rounds both vectors to f32 precision, so in-memory use matches what a
  /// saved stats file reloads to.
  NormStats quantized() const;
};

constexpr double kStddevFloor = 1e-8;

NormStats compute_norm_stats(const Mat<float>& vectors);

/// (x - mean) / stddev per component. Throws DataError on dimension mismatch.
void normalize_inplace(Mat<float>& vectors, const NormStats& stats);

// Feature file format: magic "HACF", version u32, T u32, dim u32, then
// T x dim f32 row-major. Norm stats use the same layout with T = 2
// (row 0 mean, row 1 stddev).
void write_feature_file(const std::string& path, const Mat<float>& features);
Mat<float> read_feature_file(const std::string& path);
void write_norm_stats(const std::string& path, const NormStats& stats);
NormStats read_norm_stats(const std::string& path);

}  // namespace asc

#endif  // ASC_FEATURES_H_
