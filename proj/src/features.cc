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

#include "asc/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "asc/error.h"
#include "asc/io_binary.h"

namespace asc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

void FramingConfig::validate() const {
  if (hop_samples <= 0 || frame_length_samples < hop_samples ||
      fft_size < frame_length_samples) {
    throw ConfigError("framing requires 0 < hop <= frame_length <= fft_size");
  }
  if (!is_power_of_two(fft_size)) {
    throw ConfigError("fft_size must be a power of two, got " +
                      std::to_string(fft_size));
  }
}

size_t frame_count(size_t len, int frame_length, int hop) {
  return (len - static_cast<size_t>(frame_length)) /
             static_cast<size_t>(hop) +
         1;
}

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::kRectangular || length == 1) return w;
  const double step = 2.0 * std::numbers::pi / (length - 1);
  for (int n = 0; n < length; ++n) {
    const double c = std::cos(step * n);
    w[n] = kind == WindowKind::kHamming ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w;
}

Mat<float> frame_signal(const PcmSignal& signal, const FramingConfig& cfg) {
  cfg.validate();
  const size_t len = signal.samples.size();
  if (len < static_cast<size_t>(cfg.frame_length_samples)) {
    throw DataError("signal shorter than one frame (" + std::to_string(len) +
                    " < " + std::to_string(cfg.frame_length_samples) + ")");
  }
  const size_t count = frame_count(len, cfg.frame_length_samples, cfg.hop_samples);
  const std::vector<double> window =
      make_window(cfg.window, cfg.frame_length_samples);

  Mat<float> frames(count, cfg.frame_length_samples);
  for (size_t f = 0; f < count; ++f) {
    const size_t start = f * cfg.hop_samples;
    auto out = frames.row(f);
    for (int n = 0; n < cfg.frame_length_samples; ++n) {
      out[n] = static_cast<float>(signal.samples[start + n] * window[n]);
    }
  }
  return frames;
}

std::vector<double> power_spectrum(std::span<const float> frame,
                                   int fft_size) {
  ASC_CHECK(is_power_of_two(fft_size), "fft size must be a power of two");
  ASC_CHECK(frame.size() <= static_cast<size_t>(fft_size),
            "frame longer than fft size");
  std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
  for (size_t n = 0; n < frame.size(); ++n) buf[n] = frame[n];
  fft_inplace(buf);
  std::vector<double> power(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) power[k] = std::norm(buf[k]);
  return power;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterBank build_mel_filterbank(const FramingConfig& cfg, int num_filters,
                                   double min_freq_hz, double max_freq_hz) {
  cfg.validate();
  if (num_filters < 1) throw ConfigError("num_filters must be >= 1");
  const double nyquist = kRequiredSampleRate / 2.0;
  if (min_freq_hz < 0.0 || min_freq_hz >= max_freq_hz ||
      max_freq_hz > nyquist) {
    throw ConfigError("mel range requires 0 <= min < max <= " +
                      std::to_string(nyquist));
  }

  const int num_bins = cfg.fft_size / 2 + 1;
  const double bin_width = static_cast<double>(kRequiredSampleRate) / cfg.fft_size;
  const double mel_lo = hz_to_mel(min_freq_hz);
  const double mel_hi = hz_to_mel(max_freq_hz);
  const double mel_step = (mel_hi - mel_lo) / (num_filters + 1);

  MelFilterBank fb;
  fb.num_filters = num_filters;
  fb.min_freq_hz = min_freq_hz;
  fb.max_freq_hz = max_freq_hz;
  fb.filters.resize(num_filters, num_bins);
  fb.center_freqs_hz.resize(num_filters);

  for (int i = 0; i < num_filters; ++i) {
    const double left = mel_lo + i * mel_step;
    const double center = mel_lo + (i + 1) * mel_step;
    const double right = mel_lo + (i + 2) * mel_step;
    fb.center_freqs_hz[i] = mel_to_hz(center);

    // Triangle in the mel domain, then rescaled so the row peak is exactly 1.
    double row_max = 0.0;
    auto row = fb.filters.row(i);
    for (int k = 0; k < num_bins; ++k) {
      const double mel = hz_to_mel(k * bin_width);
      double w = 0.0;
      if (mel > left && mel < right) {
        w = mel <= center ? (mel - left) / (center - left)
                          : (right - mel) / (right - center);
      }
      row[k] = static_cast<float>(w);
      row_max = std::max(row_max, w);
    }
    if (row_max <= 0.0) {
      throw ConfigError("mel filter " + std::to_string(i) +
                        " covers no FFT bin; reduce num_filters or raise "
                        "fft_size");
    }
    for (int k = 0; k < num_bins; ++k) {
      row[k] = static_cast<float>(row[k] / row_max);
    }
  }
  return fb;
}

MelFeatureSequence extract_log_mel(const PcmSignal& signal,
                                   const FramingConfig& cfg,
                                   const MelFilterBank& fb) {
  ASC_CHECK(fb.filters.cols() == static_cast<size_t>(cfg.fft_size / 2 + 1),
            "filterbank and fft size disagree");
  const Mat<float> frames = frame_signal(signal, cfg);

  MelFeatureSequence seq;
  seq.frames.resize(frames.rows(), fb.num_filters);
  for (size_t f = 0; f < frames.rows(); ++f) {
    const std::vector<double> power = power_spectrum(frames.row(f), cfg.fft_size);
    for (int i = 0; i < fb.num_filters; ++i) {
      auto filter = fb.filters.row(i);
      double energy = 0.0;
      for (size_t k = 0; k < power.size(); ++k) {
        energy += filter[k] * power[k];
      }
      seq.frames(f, i) =
          static_cast<float>(std::log(std::max(energy, kLogFloor)));
    }
  }
  return seq;
}

Mat<float> stack_context(const Mat<float>& features, int context) {
  if (context < 1 || context % 2 == 0) {
    throw ConfigError("context must be odd and positive, got " +
                      std::to_string(context));
  }
  if (features.rows() == 0) throw DataError("cannot stack an empty sequence");

  const int half = context / 2;
  const long last = static_cast<long>(features.rows()) - 1;
  const size_t dim = features.cols();

  Mat<float> stacked(features.rows(), dim * context);
  for (long t = 0; t <= last; ++t) {
    auto out = stacked.row(t);
    for (int c = -half; c <= half; ++c) {
      const long src = std::clamp(t + c, 0L, last);
      auto in = features.row(src);
      std::copy(in.begin(), in.end(), out.begin() + (c + half) * dim);
    }
  }
  return stacked;
}

NormStats NormStats::quantized() const {
  NormStats q;
  q.mean.reserve(mean.size());
  q.stddev.reserve(stddev.size());
  for (double m : mean) q.mean.push_back(static_cast<float>(m));
  for (double s : stddev) q.stddev.push_back(static_cast<float>(s));
  return q;
}

NormStats compute_norm_stats(const Mat<float>& vectors) {
  if (vectors.rows() == 0) {
    throw DataError("cannot compute norm stats from an empty collection");
  }
  const size_t dim = vectors.cols();
  const double n = static_cast<double>(vectors.rows());

  NormStats stats;
  stats.mean.assign(dim, 0.0);
  stats.stddev.assign(dim, 0.0);

  for (size_t r = 0; r < vectors.rows(); ++r) {
    auto row = vectors.row(r);
    for (size_t d = 0; d < dim; ++d) stats.mean[d] += row[d];
  }
  for (size_t d = 0; d < dim; ++d) stats.mean[d] /= n;

  for (size_t r = 0; r < vectors.rows(); ++r) {
    auto row = vectors.row(r);
    for (size_t d = 0; d < dim; ++d) {
      const double diff = row[d] - stats.mean[d];
      stats.stddev[d] += diff * diff;
    }
  }
  for (size_t d = 0; d < dim; ++d) {
    stats.stddev[d] = std::max(std::sqrt(stats.stddev[d] / n), kStddevFloor);
  }
  return stats;
}

void normalize_inplace(Mat<float>& vectors, const NormStats& stats) {
  if (vectors.cols() != stats.mean.size() ||
      stats.mean.size() != stats.stddev.size()) {
    throw DataError("norm stats dimension mismatch: vectors are " +
                    std::to_string(vectors.cols()) + "-d, stats are " +
                    std::to_string(stats.mean.size()) + "-d");
  }
  for (size_t r = 0; r < vectors.rows(); ++r) {
    auto row = vectors.row(r);
    for (size_t d = 0; d < vectors.cols(); ++d) {
      row[d] = static_cast<float>((row[d] - stats.mean[d]) / stats.stddev[d]);
    }
  }
}

static constexpr char kFeatureMagic[4] = {'H', 'A', 'C', 'F'};
static constexpr uint32_t kFeatureVersion = 1;

void write_feature_file(const std::string& path, const Mat<float>& features) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write feature file: " + path);
  write_magic(os, kFeatureMagic);
  write_u32_le(os, kFeatureVersion);
  write_u32_le(os, static_cast<uint32_t>(features.rows()));
  write_u32_le(os, static_cast<uint32_t>(features.cols()));
  for (size_t i = 0; i < features.size(); ++i) {
    write_f32_le(os, features.data()[i]);
  }
  if (!os) throw DataError("failed writing feature file: " + path);
}

Mat<float> read_feature_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file: " + path);
  expect_magic(is, kFeatureMagic, path);
  const uint32_t version = read_u32_le(is, "feature version");
  if (version != kFeatureVersion) {
    throw DataError("unsupported feature file version " +
                    std::to_string(version) + " in " + path);
  }
  const uint32_t rows = read_u32_le(is, "feature rows");
  const uint32_t cols = read_u32_le(is, "feature cols");
  if (rows == 0 || cols == 0) {
    throw DataError("degenerate feature shape in " + path);
  }
  Mat<float> features(rows, cols);
  for (size_t i = 0; i < features.size(); ++i) {
    features.data()[i] = read_f32_le(is, "feature data");
  }
  return features;
}

void write_norm_stats(const std::string& path, const NormStats& stats) {
  ASC_CHECK(stats.mean.size() == stats.stddev.size(),
            "norm stats vectors disagree");
  Mat<float> rows(2, stats.mean.size());
  for (size_t d = 0; d < stats.mean.size(); ++d) {
    rows(0, d) = static_cast<float>(stats.mean[d]);
    rows(1, d) = static_cast<float>(stats.stddev[d]);
  }
  write_feature_file(path, rows);
}

NormStats read_norm_stats(const std::string& path) {
  const Mat<float> rows = read_feature_file(path);
  if (rows.rows() != 2) {
    throw DataError("norm stats file must have 2 rows, got " +
                    std::to_string(rows.rows()) + " in " + path);
  }
  NormStats stats;
  stats.mean.assign(rows.row(0).begin(), rows.row(0).end());
  stats.stddev.assign(rows.row(1).begin(), rows.row(1).end());
  return stats;
}

}  // namespace asc
