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

#include "asc/synthetic.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "asc/error.h"
#include "asc/features.h"
#include "asc/logging.h"
#include "asc/rng.h"
#include "asc/wav.h"

namespace asc {

namespace fs = std::filesystem;

void SyntheticCorpusConfig::validate(const Taxonomy& taxonomy) const {
  if (segments_per_class < 1 || frames_per_segment < 1) {
    throw ConfigError("segment and frame counts must be >= 1");
  }
  if (num_folds < 2) {
    throw ConfigError("need >= 2 folds so every fold has a training side");
  }
  if (segments_per_class < num_folds) {
    throw ConfigError("fewer segments per class than folds");
  }
  if (!(noise_stddev > 0.0) || !(separation > 0.0)) {
    throw ConfigError("noise and separation must be positive");
  }
  if (separation <= 4.0 * noise_stddev) {
    throw ConfigError("separation must exceed 4x the noise stddev");
  }
  if (feature_dim < taxonomy.num_high() + taxonomy.num_low()) {
    throw ConfigError("feature_dim too small: one axis per class and per "
                      "super-cluster is required");
  }
  if (out_dir.empty()) throw ConfigError("synthetic corpus needs an out dir");
}

Mat<double> synthetic_class_means(const SyntheticCorpusConfig& cfg,
                                  const Taxonomy& taxonomy) {
  cfg.validate(taxonomy);
  Mat<double> means(static_cast<size_t>(taxonomy.num_low()),
                    static_cast<size_t>(cfg.feature_dim), 0.0);
  for (int c = 0; c < taxonomy.num_low(); ++c) {
    means(c, taxonomy.parent_of(c)) = cfg.separation;
    means(c, taxonomy.num_high() + c) = cfg.separation / 4.0;
  }
  return means;
}

namespace {

// Sinusoid mixture for WAV mode: three class-specific tones, random phases,
// a little noise. Frequencies stay far below Nyquist for 15 classes.
std::vector<float> synth_segment_audio(int class_index, size_t num_samples,
                                       Rng& rng) {
  const double f1 = 200.0 + 60.0 * class_index;
  const double f2 = 1000.0 + 120.0 * class_index;
  const double f3 = 3500.0 + 140.0 * class_index;
  const double p1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double p2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double p3 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double w = 2.0 * std::numbers::pi / kRequiredSampleRate;
  std::vector<float> samples(num_samples);
  for (size_t n = 0; n < num_samples; ++n) {
    const double t = static_cast<double>(n);
    const double s = 0.25 * std::sin(w * f1 * t + p1) +
                     0.25 * std::sin(w * f2 * t + p2) +
                     0.25 * std::sin(w * f3 * t + p3) +
                     0.01 * rng.normal();
    samples[n] = static_cast<float>(s);
  }
  return samples;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusConfig& cfg,
                                          const Taxonomy& taxonomy) {
  cfg.validate(taxonomy);
  fs::create_directories(cfg.out_dir);
  const fs::path data_dir = fs::path(cfg.out_dir) / "segments";
  fs::create_directories(data_dir);

  SyntheticCorpus corpus;
  corpus.class_means = synthetic_class_means(cfg, taxonomy);

  const FramingConfig framing;
  const size_t samples_per_segment =
      cfg.frames_per_segment > 0
          ? static_cast<size_t>(cfg.frames_per_segment - 1) *
                    framing.hop_samples +
                framing.frame_length_samples
          : 0;

  Rng rng(cfg.seed);
  char name[64];
  for (int c = 0; c < taxonomy.num_low(); ++c) {
    const std::string& class_name = taxonomy.low_name(c);
    for (int i = 0; i < cfg.segments_per_class; ++i) {
      SegmentRecord rec;
      rec.low_class = class_name;
      rec.fold = (i % cfg.num_folds) + 1;
      std::snprintf(name, sizeof(name), "%s_%03d.%s", class_name.c_str(), i,
                    cfg.write_wav ? "wav" : "feat");
      const fs::path file = data_dir / name;
      rec.path = file.string();
      rec.segment_id = file.stem().string();

      if (cfg.write_wav) {
        write_wav_pcm16(rec.path,
                        synth_segment_audio(c, samples_per_segment, rng),
                        kRequiredSampleRate);
      } else {
        Mat<float> frames(static_cast<size_t>(cfg.frames_per_segment),
                          static_cast<size_t>(cfg.feature_dim));
        for (size_t t = 0; t < frames.rows(); ++t) {
          auto row = frames.row(t);
          for (size_t d = 0; d < row.size(); ++d) {
            row[d] = static_cast<float>(corpus.class_means(c, d) +
                                        cfg.noise_stddev * rng.normal());
          }
        }
        write_feature_file(rec.path, frames);
      }
      corpus.records.push_back(std::move(rec));
    }
  }

  corpus.manifest_path = (fs::path(cfg.out_dir) / "manifest.csv").string();
  save_manifest(corpus.records, corpus.manifest_path);
  corpus.taxonomy_path = (fs::path(cfg.out_dir) / "taxonomy.csv").string();
  taxonomy.save_csv(corpus.taxonomy_path);
  log_info("synthetic corpus: ", corpus.records.size(), " segments under ",
           cfg.out_dir);
  return corpus;
}

}  // namespace asc
