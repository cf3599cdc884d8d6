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

#ifndef ASC_DECISION_H_
#define ASC_DECISION_H_

#include <vector>

#include "asc/mat.h"

// Segment-level decisions from frame posteriors. The averaging rule picks the
// class with the highest mean posterior across the segment's frames; majority
// voting over per-frame argmax decisions is kept as a comparison baseline.

namespace asc {

/// Frame posteriors for one segment, held in double. Each row is a
/// distribution over classes summing to 1 within 1e-9.
struct SegmentPosteriors {
  Mat<double> frames;  // T x J

  size_t num_frames() const { return frames.rows(); }
  size_t num_classes() const { return frames.cols(); }

  /// Throws DataError when empty, non-finite, negative, or a row is off
  /// normalization by more than 1e-9.
  void validate() const;
};

/// Renormalizes float network outputs row by row in double so the row-sum
/// contract holds exactly to tolerance.
SegmentPosteriors make_segment_posteriors(const Mat<float>& frame_posteriors);

struct SegmentDecision {
  int class_index = -1;
  double confidence = 0.0;  // mean posterior of the winning class
  double margin = 0.0;      // winner minus runner-up mean posterior
  std::vector<double> mean_posterior;
};

/// Average-confidence rule: argmax_j (1/T) * sum_t p[t, j]. Ties resolve to
/// the lowest class index.
SegmentDecision classify_segment(const SegmentPosteriors& seg);

/// Per-frame argmax, then the most frequent frame label. Both the frame
/// argmax and the vote resolve ties to the lowest index.
int majority_vote(const SegmentPosteriors& seg);

}  // namespace asc

#endif  // ASC_DECISION_H_
