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

#include "asc/dataset.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "asc/error.h"

namespace asc {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

int parse_fold(const std::string& s, const std::string& path, size_t line_no) {
  try {
    size_t pos = 0;
    const int fold = std::stoi(s, &pos);
    if (pos != s.size() || fold < 0) throw std::invalid_argument(s);
    return fold;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": fold must be a non-negative integer, got '" + s + "'");
  }
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace

std::vector<SegmentRecord> load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();

  std::vector<SegmentRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;

    std::vector<std::string> fields =
        row.find('\t') != std::string::npos ? split(row, '\t')
                                            : split(row, ',');
    if (line_no == 1 && !fields.empty() && fields[0] == "segment_path") {
      continue;  // header row
    }
    SegmentRecord rec;
    if (fields.size() == 3) {
      rec.path = fields[0];
      rec.low_class = fields[1];
      rec.fold = parse_fold(fields[2], path, line_no);
    } else if (fields.size() == 2) {
      rec.path = fields[0];
      rec.low_class = fields[1];
      rec.fold = 0;
    } else {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 2 or 3 fields, got " +
                      std::to_string(fields.size()));
    }
    if (rec.path.empty() || rec.low_class.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": empty path or class");
    }
    std::filesystem::path p(rec.path);
    if (p.is_relative()) p = base / p;
    rec.path = p.lexically_normal().string();
    rec.segment_id = stem_of(rec.path);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError("manifest holds no segments: " + path);
  return records;
}

void save_manifest(const std::vector<SegmentRecord>& records,
                   const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open manifest for writing: " + path);
  os << "segment_path,low_class,fold\n";
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  for (const auto& rec : records) {
    std::filesystem::path p(rec.path);
    const std::filesystem::path rel = p.lexically_proximate(base);
    os << rel.generic_string() << "," << rec.low_class << "," << rec.fold
       << "\n";
  }
  if (!os) throw DataError("failed writing manifest: " + path);
}

StatsAccumulator::StatsAccumulator(size_t dim)
    : dim_(dim), sum_(dim, 0.0), sum_sq_(dim, 0.0) {
  if (dim == 0) throw DataError("statistics over zero dimensions");
}

void StatsAccumulator::add(const Mat<float>& rows) {
  if (rows.cols() != dim_) {
    throw DataError("feature dimension " + std::to_string(rows.cols()) +
                    " does not match accumulator dimension " +
                    std::to_string(dim_));
  }
  for (size_t t = 0; t < rows.rows(); ++t) {
    auto r = rows.row(t);
    for (size_t d = 0; d < dim_; ++d) {
      const double v = static_cast<double>(r[d]);
      sum_[d] += v;
      sum_sq_[d] += v * v;
    }
  }
  count_ += rows.rows();
}

NormStats StatsAccumulator::finalize() const {
  if (count_ == 0) throw DataError("no frames accumulated for statistics");
  NormStats stats;
  stats.mean.resize(dim_);
  stats.stddev.resize(dim_);
  const double inv_n = 1.0 / static_cast<double>(count_);
  for (size_t d = 0; d < dim_; ++d) {
    const double mean = sum_[d] * inv_n;
    const double var = std::max(sum_sq_[d] * inv_n - mean * mean, 0.0);
    stats.mean[d] = mean;
    stats.stddev[d] = std::max(std::sqrt(var), kStddevFloor);
  }
  return stats;
}

Mat<float> load_stacked_segment(const SegmentRecord& record, int context) {
  const Mat<float> raw = read_feature_file(record.path);
  return stack_context(raw, context);
}

NormStats compute_stats_for_records(const std::vector<SegmentRecord>& records,
                                    int context) {
  if (records.empty()) throw DataError("no segments to compute statistics on");
  std::optional<StatsAccumulator> acc;
  for (const auto& rec : records) {
    const Mat<float> stacked = load_stacked_segment(rec, context);
    if (!acc) acc.emplace(stacked.cols());
    acc->add(stacked);
  }
  return acc->finalize();
}

FrameDataset assemble_frame_dataset(const std::vector<SegmentRecord>& records,
                                    const Taxonomy& taxonomy,
                                    const NormStats& stats, int context) {
  if (records.empty()) throw DataError("no segments to assemble");
  FrameDataset ds;
  ds.segments = records;
  ds.segment_begin.push_back(0);

  std::vector<Mat<float>> per_segment;
  per_segment.reserve(records.size());
  size_t total = 0;
  size_t dim = 0;
  for (const auto& rec : records) {
    Mat<float> stacked = load_stacked_segment(rec, context);
    if (dim == 0) {
      dim = stacked.cols();
      if (stats.mean.size() != dim) {
        throw DataError("statistics dimension " +
                        std::to_string(stats.mean.size()) +
                        " does not match stacked feature dimension " +
                        std::to_string(dim));
      }
    } else if (stacked.cols() != dim) {
      throw DataError(rec.path + ": feature dimension " +
                      std::to_string(stacked.cols()) +
                      " differs from the rest of the corpus (" +
                      std::to_string(dim) + ")");
    }
    normalize_inplace(stacked, stats);
    total += stacked.rows();
    ds.segment_begin.push_back(total);
    per_segment.push_back(std::move(stacked));
  }

  ds.features.resize(total, dim);
  ds.low_labels.resize(total);
  ds.high_labels.resize(total);
  size_t row = 0;
  for (size_t s = 0; s < records.size(); ++s) {
    const int low = taxonomy.low_index(records[s].low_class);
    if (low < 0) {
      throw DataError(records[s].path + ": unknown class '" +
                      records[s].low_class + "'");
    }
    const int high = taxonomy.parent_of(low);
    const Mat<float>& seg = per_segment[s];
    for (size_t t = 0; t < seg.rows(); ++t, ++row) {
      auto src = seg.row(t);
      auto dst = ds.features.row(row);
      std::copy(src.begin(), src.end(), dst.begin());
      ds.low_labels[row] = low;
      ds.high_labels[row] = high;
    }
  }
  return ds;
}

}  // namespace asc
