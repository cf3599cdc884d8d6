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

#ifndef ASC_EVALUATION_H_
#define ASC_EVALUATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asc/dataset.h"
#include "asc/network.h"
#include "asc/taxonomy.h"

// Cross-validation harness: per-fold segment accuracy via the
// average-confidence rule, frame-wise accuracy for the coarse task, and
// confusion-matrix bookkeeping pooled across folds.

namespace asc {

/// One train/test partition. Segments never appear on both sides.
struct FoldSpec {
  int fold_id = 1;
  std::vector<SegmentRecord> train;
  std::vector<SegmentRecord> test;

  /// Throws DataError when a segment id sits in both sets or a side is empty.
  void validate() const;
};

/// Splits a manifest by its fold column: test = records with fold ==
/// fold_id, train = the rest.
FoldSpec make_fold(const std::vector<SegmentRecord>& records, int fold_id);

/// Distinct nonzero fold ids present in a manifest, ascending.
std::vector<int> fold_ids(const std::vector<SegmentRecord>& records);

struct ConfusionMatrix {
  Mat<int64_t> counts;  // rows = true class, columns = predicted

  int num_classes() const { return static_cast<int>(counts.rows()); }
  int64_t total() const;
  int64_t row_sum(int true_class) const;
  /// Diagonal count over total; the cross-check for segment accuracy.
  double diagonal_accuracy() const;
  /// Elementwise sum; dimensions must agree (an empty matrix adopts other).
  void accumulate(const ConfusionMatrix& other);
};

/// counts[true][pred] incremented per aligned pair. Throws DataError for
/// length mismatch or out-of-range indices.
ConfusionMatrix confusion_matrix(const std::vector<int>& decisions,
                                 const std::vector<int>& truths,
                                 int num_classes);

struct PredictionRow {
  std::string segment_id;
  int true_class = -1;
  int predicted_class = -1;
  double confidence = 0.0;  // top-1 mean posterior
  double margin = 0.0;
};

struct FoldReport {
  int fold_id = 0;
  double segment_accuracy = 0.0;  // fraction in [0, 1]
  ConfusionMatrix confusion;
  std::vector<PredictionRow> predictions;
};

/// Classifies every test segment of the fold: stack, normalize with `stats`
/// (which must come from the fold's training side), infer, average
/// confidence. Throws DataError for unknown labels or missing files.
FoldReport evaluate_fold(const Network<float>& net, const FoldSpec& fold,
                         const Taxonomy& taxonomy, const NormStats& stats,
                         int context);

/// Frame-wise accuracy of a coarse-task network: fraction of frames whose
/// argmax posterior hits the high-level target. Throws ConfigError when the
/// head size does not match the taxonomy's high-level class count.
double frame_accuracy_high_level(const Network<float>& net,
                                 const FrameDataset& frames,
                                 const Taxonomy& taxonomy);

struct EvaluationReport {
  std::vector<FoldReport> folds;
  double average_accuracy = 0.0;  // unweighted mean of fold accuracies
  ConfusionMatrix pooled;         // elementwise sum over folds
};

/// Unweighted mean over folds plus the pooled confusion matrix. Requires at
/// least one fold.
EvaluationReport aggregate_cv(std::vector<FoldReport> folds);

// Report files.
void write_report_text(const EvaluationReport& report,
                       const Taxonomy& taxonomy, const std::string& path);
void write_fold_csv(const EvaluationReport& report, const std::string& path);
void write_confusion_csv(const ConfusionMatrix& cm, const Taxonomy& taxonomy,
                         const std::string& path);
void write_predictions_csv(const FoldReport& report, const Taxonomy& taxonomy,
                           const std::string& path);

}  // namespace asc

#endif  // ASC_EVALUATION_H_
