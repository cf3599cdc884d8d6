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

#include "asc/decision.h"

#include <cmath>
#include <string>

#include "asc/error.h"

namespace asc {

namespace {
constexpr double kRowSumTolerance = 1e-9;
}  // namespace

void SegmentPosteriors::validate() const {
  if (frames.rows() == 0 || frames.cols() == 0) {
    throw DataError("segment has no posterior frames");
  }
  for (size_t t = 0; t < frames.rows(); ++t) {
    double sum = 0.0;
    for (size_t j = 0; j < frames.cols(); ++j) {
      const double p = frames(t, j);
      if (!std::isfinite(p) || p < 0.0) {
        throw DataError("posterior frame " + std::to_string(t) +
                        " holds an invalid probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw DataError("posterior frame " + std::to_string(t) +
                      " is not normalized (sum " + std::to_string(sum) + ")");
    }
  }
}

SegmentPosteriors make_segment_posteriors(const Mat<float>& frame_posteriors) {
  if (frame_posteriors.rows() == 0 || frame_posteriors.cols() == 0) {
    throw DataError("segment has no posterior frames");
  }
  SegmentPosteriors seg;
  seg.frames.resize(frame_posteriors.rows(), frame_posteriors.cols());
  for (size_t t = 0; t < frame_posteriors.rows(); ++t) {
    double sum = 0.0;
    for (size_t j = 0; j < frame_posteriors.cols(); ++j) {
      const double p = static_cast<double>(frame_posteriors(t, j));
      if (!std::isfinite(p) || p < 0.0) {
        throw DataError("posterior frame " + std::to_string(t) +
                        " holds an invalid probability");
      }
      seg.frames(t, j) = p;
      sum += p;
    }
    if (sum <= 0.0) {
      throw DataError("posterior frame " + std::to_string(t) + " sums to zero");
    }
    for (size_t j = 0; j < frame_posteriors.cols(); ++j) {
      seg.frames(t, j) /= sum;
    }
  }
  return seg;
}

SegmentDecision classify_segment(const SegmentPosteriors& seg) {
  seg.validate();
  const size_t n_frames = seg.num_frames();
  const size_t n_classes = seg.num_classes();

  SegmentDecision decision;
  decision.mean_posterior.assign(n_classes, 0.0);
  for (size_t t = 0; t < n_frames; ++t) {
    for (size_t j = 0; j < n_classes; ++j) {
      decision.mean_posterior[j] += seg.frames(t, j);
    }
  }
  const double inv_t = 1.0 / static_cast<double>(n_frames);
  for (double& m : decision.mean_posterior) m *= inv_t;

  size_t best = 0;
  for (size_t j = 1; j < n_classes; ++j) {
    if (decision.mean_posterior[j] > decision.mean_posterior[best]) best = j;
  }
  double runner_up = 0.0;
  for (size_t j = 0; j < n_classes; ++j) {
    if (j != best && decision.mean_posterior[j] > runner_up) {
      runner_up = decision.mean_posterior[j];
    }
  }
  decision.class_index = static_cast<int>(best);
  decision.confidence = decision.mean_posterior[best];
  decision.margin = n_classes > 1 ? decision.confidence - runner_up
                                  : decision.confidence;
  return decision;
}

int majority_vote(const SegmentPosteriors& seg) {
  seg.validate();
  std::vector<size_t> votes(seg.num_classes(), 0);
  for (size_t t = 0; t < seg.num_frames(); ++t) {
    auto row = seg.frames.row(t);
    size_t best = 0;
    for (size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    ++votes[best];
  }
  size_t winner = 0;
  for (size_t j = 1; j < votes.size(); ++j) {
    if (votes[j] > votes[winner]) winner = j;
  }
  return static_cast<int>(winner);
}

}  // namespace asc
