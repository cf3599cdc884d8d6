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

#ifndef ASC_SYNTHETIC_H_
#define ASC_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asc/dataset.h"
#include "asc/mat.h"
#include "asc/taxonomy.h"

// Deterministic synthetic corpus for desk-scale experiments: Gaussian class
// clusters in feature space whose means group into well-separated
// super-clusters matching the taxonomy's high-level partition. A WAV mode
// writes sinusoid-mixture audio instead, exercising the full front end.

namespace asc {

struct SyntheticCorpusConfig {
  uint64_t seed = 0;
  int segments_per_class = 20;
  int frames_per_segment = 100;
  int num_folds = 4;
  int feature_dim = 40;
  double noise_stddev = 1.0;
  double separation = 6.0;  // distance scale between super-cluster centers
  bool write_wav = false;   // sinusoid mixtures instead of feature files
  std::string out_dir;

  /// Requires separation > 4 * noise_stddev (near-separability), positive
  /// counts, and feature_dim large enough for one axis per class plus one
  /// per super-cluster. Throws ConfigError.
  void validate(const Taxonomy& taxonomy) const;
};

struct SyntheticCorpus {
  std::string manifest_path;
  std::string taxonomy_path;
  std::vector<SegmentRecord> records;
  Mat<double> class_means;  // num_low x feature_dim, for centroid oracles
};

/// Class means implied by a config: super-cluster g centers at
/// separation * e_g, and class c adds (separation / 4) * e_{num_high + c}.
/// Within-cluster mean distances are a quarter of the between-cluster ones.
Mat<double> synthetic_class_means(const SyntheticCorpusConfig& cfg,
                                  const Taxonomy& taxonomy);

/// Writes the corpus under cfg.out_dir: per-segment feature (or WAV) files,
/// manifest.csv with folds assigned round-robin within each class, and
/// taxonomy.csv. Byte-identical output for a fixed config.
SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusConfig& cfg,
                                          const Taxonomy& taxonomy);

}  // namespace asc

#endif  // ASC_SYNTHETIC_H_
