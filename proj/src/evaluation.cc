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

#include "asc/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "asc/decision.h"
#include "asc/error.h"
#include "asc/logging.h"
#include "asc/training.h"

namespace asc {

namespace {
constexpr size_t kInferChunk = 1024;
}  // namespace

void FoldSpec::validate() const {
  if (train.empty() || test.empty()) {
    throw DataError("fold " + std::to_string(fold_id) +
                    " has an empty train or test side");
  }
  std::set<std::string> train_ids;
  for (const auto& rec : train) train_ids.insert(rec.segment_id);
  for (const auto& rec : test) {
    if (train_ids.count(rec.segment_id) > 0) {
      throw DataError("segment '" + rec.segment_id +
                      "' appears in both train and test of fold " +
                      std::to_string(fold_id));
    }
  }
}

FoldSpec make_fold(const std::vector<SegmentRecord>& records, int fold_id) {
  if (fold_id < 1) throw ConfigError("fold id must be >= 1");
  FoldSpec fold;
  fold.fold_id = fold_id;
  for (const auto& rec : records) {
    (rec.fold == fold_id ? fold.test : fold.train).push_back(rec);
  }
  fold.validate();
  return fold;
}

std::vector<int> fold_ids(const std::vector<SegmentRecord>& records) {
  std::set<int> ids;
  for (const auto& rec : records) {
    if (rec.fold > 0) ids.insert(rec.fold);
  }
  return {ids.begin(), ids.end()};
}

int64_t ConfusionMatrix::total() const {
  int64_t sum = 0;
  for (size_t i = 0; i < counts.size(); ++i) sum += counts.data()[i];
  return sum;
}

int64_t ConfusionMatrix::row_sum(int true_class) const {
  if (true_class < 0 || static_cast<size_t>(true_class) >= counts.rows()) {
    throw DataError("confusion row out of range");
  }
  int64_t sum = 0;
  for (auto v : counts.row(static_cast<size_t>(true_class))) sum += v;
  return sum;
}

double ConfusionMatrix::diagonal_accuracy() const {
  const int64_t all = total();
  if (all == 0) return 0.0;
  int64_t diag = 0;
  for (size_t j = 0; j < counts.rows(); ++j) diag += counts(j, j);
  return static_cast<double>(diag) / static_cast<double>(all);
}

void ConfusionMatrix::accumulate(const ConfusionMatrix& other) {
  if (other.counts.empty()) return;
  if (counts.empty()) {
    counts = other.counts;
    return;
  }
  if (counts.rows() != other.counts.rows() ||
      counts.cols() != other.counts.cols()) {
    throw DataError("cannot pool confusion matrices of different shapes");
  }
  for (size_t i = 0; i < counts.size(); ++i) {
    counts.data()[i] += other.counts.data()[i];
  }
}

ConfusionMatrix confusion_matrix(const std::vector<int>& decisions,
                                 const std::vector<int>& truths,
                                 int num_classes) {
  if (decisions.size() != truths.size()) {
    throw DataError("decision/truth count mismatch");
  }
  if (num_classes < 1) throw ConfigError("confusion needs >= 1 class");
  ConfusionMatrix cm;
  cm.counts.resize(static_cast<size_t>(num_classes),
                   static_cast<size_t>(num_classes), 0);
  for (size_t i = 0; i < decisions.size(); ++i) {
    const int pred = decisions[i];
    const int truth = truths[i];
    if (pred < 0 || pred >= num_classes || truth < 0 ||
        truth >= num_classes) {
      throw DataError("class index out of range in confusion input");
    }
    ++cm.counts(static_cast<size_t>(truth), static_cast<size_t>(pred));
  }
  return cm;
}

namespace {

// Frame posteriors of the low head for one already-normalized segment.
Mat<float> infer_segment(const Network<float>& net, const Mat<float>& frames) {
  Mat<float> post(frames.rows(), net.num_low());
  Mat<float> chunk;
  for (size_t begin = 0; begin < frames.rows(); begin += kInferChunk) {
    const size_t n = std::min(kInferChunk, frames.rows() - begin);
    chunk.resize(n, frames.cols());
    for (size_t r = 0; r < n; ++r) {
      auto src = frames.row(begin + r);
      std::copy(src.begin(), src.end(), chunk.row(r).begin());
    }
    const ForwardOutput<float> out = forward_infer(net, chunk);
    for (size_t r = 0; r < n; ++r) {
      auto src = out.low.row(r);
      std::copy(src.begin(), src.end(), post.row(begin + r).begin());
    }
  }
  return post;
}

}  // namespace

FoldReport evaluate_fold(const Network<float>& net, const FoldSpec& fold,
                         const Taxonomy& taxonomy, const NormStats& stats,
                         int context) {
  fold.validate();
  if (static_cast<int>(net.num_low()) != taxonomy.num_low()) {
    throw DataError("model head size " + std::to_string(net.num_low()) +
                    " does not match taxonomy (" +
                    std::to_string(taxonomy.num_low()) + " classes)");
  }

  FoldReport report;
  report.fold_id = fold.fold_id;
  std::vector<int> decisions;
  std::vector<int> truths;
  decisions.reserve(fold.test.size());
  truths.reserve(fold.test.size());

  for (const auto& rec : fold.test) {
    const int truth = taxonomy.low_index(rec.low_class);
    if (truth < 0) {
      throw DataError(rec.path + ": unknown class '" + rec.low_class + "'");
    }
    Mat<float> frames = load_stacked_segment(rec, context);
    if (frames.cols() != net.input_dim) {
      throw DataError(rec.path + ": feature dimension " +
                      std::to_string(frames.cols()) +
                      " does not match model input " +
                      std::to_string(net.input_dim));
    }
    normalize_inplace(frames, stats);
    const SegmentPosteriors post =
        make_segment_posteriors(infer_segment(net, frames));
    const SegmentDecision decision = classify_segment(post);

    decisions.push_back(decision.class_index);
    truths.push_back(truth);
    report.predictions.push_back({rec.segment_id, truth, decision.class_index,
                                  decision.confidence, decision.margin});
  }

  report.confusion =
      confusion_matrix(decisions, truths, taxonomy.num_low());
  size_t correct = 0;
  for (size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] == truths[i]) ++correct;
  }
  report.segment_accuracy =
      static_cast<double>(correct) / static_cast<double>(decisions.size());
  log_debug("fold ", fold.fold_id, " segment accuracy ",
            report.segment_accuracy);
  return report;
}

double frame_accuracy_high_level(const Network<float>& net,
                                 const FrameDataset& frames,
                                 const Taxonomy& taxonomy) {
  if (static_cast<int>(net.num_low()) != taxonomy.num_high()) {
    throw ConfigError("head size " + std::to_string(net.num_low()) +
                      " does not match the " +
                      std::to_string(taxonomy.num_high()) +
                      " high-level classes");
  }
  return frame_accuracy(net, frames.features, frames.high_labels);
}

EvaluationReport aggregate_cv(std::vector<FoldReport> folds) {
  if (folds.empty()) throw DataError("no folds to aggregate");
  EvaluationReport report;
  double sum = 0.0;
  for (const auto& fold : folds) {
    sum += fold.segment_accuracy;
    report.pooled.accumulate(fold.confusion);
  }
  report.average_accuracy = sum / static_cast<double>(folds.size());
  report.folds = std::move(folds);
  return report;
}

void write_report_text(const EvaluationReport& report,
                       const Taxonomy& taxonomy, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open report for writing: " + path);
  char buf[160];
  os << "Cross-validation report\n";
  os << "fold  segments  accuracy(%)\n";
  for (const auto& fold : report.folds) {
    std::snprintf(buf, sizeof(buf), "%4d  %8zu  %11.2f\n", fold.fold_id,
                  fold.predictions.size(), 100.0 * fold.segment_accuracy);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "average accuracy: %.2f%%\n",
                100.0 * report.average_accuracy);
  os << buf;

  if (!report.pooled.counts.empty()) {
    os << "\nPooled confusion matrix (rows = true class):\n";
    for (int j = 0; j < report.pooled.num_classes(); ++j) {
      std::snprintf(buf, sizeof(buf), "%-18s", taxonomy.low_name(j).c_str());
      os << buf;
      for (int k = 0; k < report.pooled.num_classes(); ++k) {
        std::snprintf(buf, sizeof(buf), " %5lld",
                      static_cast<long long>(report.pooled.counts(j, k)));
        os << buf;
      }
      os << "\n";
    }
  }
  if (!os) throw DataError("failed writing report: " + path);
}

void write_fold_csv(const EvaluationReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open fold CSV for writing: " + path);
  os << "fold,accuracy\n";
  char buf[64];
  for (const auto& fold : report.folds) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f\n", fold.fold_id,
                  100.0 * fold.segment_accuracy);
    os << buf;
  }
  if (!os) throw DataError("failed writing fold CSV: " + path);
}

void write_confusion_csv(const ConfusionMatrix& cm, const Taxonomy& taxonomy,
                         const std::string& path) {
  if (cm.num_classes() != taxonomy.num_low()) {
    throw DataError("confusion matrix does not match taxonomy size");
  }
  std::ofstream os(path);
  if (!os) throw DataError("cannot open confusion CSV for writing: " + path);
  for (int j = 0; j < taxonomy.num_low(); ++j) {
    os << (j ? "," : "") << taxonomy.low_name(j);
  }
  os << "\n";
  for (int j = 0; j < cm.num_classes(); ++j) {
    for (int k = 0; k < cm.num_classes(); ++k) {
      os << (k ? "," : "") << cm.counts(j, k);
    }
    os << "\n";
  }
  if (!os) throw DataError("failed writing confusion CSV: " + path);
}

void write_predictions_csv(const FoldReport& report, const Taxonomy& taxonomy,
                           const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open predictions CSV for writing: " + path);
  os << "segment_id,predicted_class,confidence_top1,margin\n";
  char buf[64];
  for (const auto& row : report.predictions) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", row.confidence,
                  row.margin);
    os << row.segment_id << "," << taxonomy.low_name(row.predicted_class)
       << buf;
  }
  if (!os) throw DataError("failed writing predictions CSV: " + path);
}

}  // namespace asc
