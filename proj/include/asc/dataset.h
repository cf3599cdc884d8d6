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

#ifndef ASC_DATASET_H_
#define ASC_DATASET_H_

#include <string>
#include <vector>

#include "asc/features.h"
#include "asc/mat.h"
#include "asc/taxonomy.h"

// Corpus manifests and in-memory frame datasets. A manifest row names one
// audio segment: its feature (or audio) file, its scene class, and the
// cross-validation fold it belongs to.

namespace asc {

struct SegmentRecord {
  std::string segment_id;  // filename stem, unique within a manifest
  std::string path;        // resolved against the manifest directory
  std::string low_class;
  int fold = 0;  // 0 means "no fold assigned"
};

/// Reads a manifest. Two layouts are accepted:
///   segment_path,low_class,fold   (header row optional)
///   segment_path<TAB>low_class    (evaluation-list form, fold = 0)
/// Relative paths resolve against the manifest's directory.
std::vector<SegmentRecord> load_manifest(const std::string& path);

void save_manifest(const std::vector<SegmentRecord>& records,
                   const std::string& path);

/// Streaming per-dimension accumulator equivalent (within double rounding)
/// to the two-pass statistics over the concatenated rows.
class StatsAccumulator {
 public:
  explicit StatsAccumulator(size_t dim);

  void add(const Mat<float>& rows);
  size_t count() const { return count_; }

  /// Population statistics with the stddev floor applied.
  NormStats finalize() const;

 private:
  size_t dim_;
  size_t count_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

/// Reads one segment's feature file and applies context stacking. The result
/// is unnormalized.
Mat<float> load_stacked_segment(const SegmentRecord& record, int context);

/// Statistics over the stacked frames of `records` (training subset only by
/// the caller's choice of records).
NormStats compute_stats_for_records(const std::vector<SegmentRecord>& records,
                                    int context);

/// Frame-level training view of a set of segments: stacked, normalized
/// features with per-frame labels at both taxonomy levels.
struct FrameDataset {
  Mat<float> features;            // N x dim
  std::vector<int> low_labels;    // per frame
  std::vector<int> high_labels;   // per frame
  std::vector<SegmentRecord> segments;
  std::vector<size_t> segment_begin;  // segments.size() + 1 offsets into rows

  size_t num_frames() const { return features.rows(); }
  size_t num_segments() const { return segments.size(); }
};

/// Loads, stacks, and normalizes every segment, binding labels through the
/// taxonomy. Throws DataError for unknown class names or dimension
/// mismatches between files, stats, and each other.
FrameDataset assemble_frame_dataset(const std::vector<SegmentRecord>& records,
                                    const Taxonomy& taxonomy,
                                    const NormStats& stats, int context);

}  // namespace asc

#endif  // ASC_DATASET_H_
