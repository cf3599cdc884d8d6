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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "asc/dataset.h"
#include "asc/error.h"
#include "asc/features.h"
#include "asc/rng.h"
#include "asc/taxonomy.h"
#include "doctest.h"
#include "testing_util.h"

using namespace asc;
using namespace asc::testing;

namespace {

Mat<float> random_features(size_t rows, size_t cols, Rng& rng) {
  Mat<float> m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<float>(rng.uniform(-2.0, 2.0));
  }
  return m;
}

}  // namespace

TEST_CASE("manifest parsing accepts both layouts") {
  TempDir tmp("dataset_manifest");

  SUBCASE("comma form with header and comments") {
    const std::string path = tmp.file("train.csv");
    write_text(path,
               "segment_path,low_class,fold\n"
               "# a comment line\n"
               "\n"
               "segments/a001.feat,beach,1\n"
               "segments/a002.feat,car,2\n"
               "/abs/b003.feat,home,0\n");
    const std::vector<SegmentRecord> records = load_manifest(path);
    REQUIRE_EQ(records.size(), 3);
    CHECK_EQ(records[0].segment_id, "a001");
    CHECK_EQ(records[0].low_class, "beach");
    CHECK_EQ(records[0].fold, 1);
    CHECK_EQ(records[0].path,
             (std::filesystem::path(tmp.path()) / "segments" / "a001.feat")
                 .lexically_normal()
                 .string());
    CHECK_EQ(records[2].path, "/abs/b003.feat");
    CHECK_EQ(records[2].fold, 0);
  }

  SUBCASE("tab-separated two-field form means fold zero") {
    const std::string path = tmp.file("eval.txt");
    write_text(path, "audio/x1.wav\tbeach\naudio/x2.wav\ttram\n");
    const std::vector<SegmentRecord> records = load_manifest(path);
    REQUIRE_EQ(records.size(), 2);
    CHECK_EQ(records[0].low_class, "beach");
    CHECK_EQ(records[0].fold, 0);
    CHECK_EQ(records[1].segment_id, "x2");
  }

  SUBCASE("header is only special on the first line") {
    const std::string path = tmp.file("no_header.csv");
    write_text(path, "a.feat,beach,1\nb.feat,car,2\n");
    CHECK_EQ(load_manifest(path).size(), 2);
  }
}

TEST_CASE("manifest parse errors") {
  TempDir tmp("dataset_manifest_bad");

  SUBCASE("wrong field count") {
    const std::string path = tmp.file("one.csv");
    write_text(path, "only_a_path\n");
    CHECK_THROWS_WITH_AS(load_manifest(path),
                         doctest::Contains("expected 2 or 3 fields"),
                         DataError);
    write_text(path, "a,b,1,extra\n");
    CHECK_THROWS_AS(load_manifest(path), DataError);
  }
  SUBCASE("bad fold") {
    const std::string path = tmp.file("fold.csv");
    write_text(path, "a.feat,beach,xyz\n");
    CHECK_THROWS_WITH_AS(load_manifest(path),
                         doctest::Contains("fold must be a non-negative"),
                         DataError);
    write_text(path, "a.feat,beach,-2\n");
    CHECK_THROWS_AS(load_manifest(path), DataError);
  }
  SUBCASE("empty path or class") {
    const std::string path = tmp.file("empty_field.csv");
    write_text(path, ",beach,1\n");
    CHECK_THROWS_WITH_AS(load_manifest(path),
                         doctest::Contains("empty path or class"), DataError);
    write_text(path, "a.feat,,1\n");
    CHECK_THROWS_AS(load_manifest(path), DataError);
  }
  SUBCASE("no segments at all") {
    const std::string path = tmp.file("empty.csv");
    write_text(path, "segment_path,low_class,fold\n# nothing\n");
    CHECK_THROWS_WITH_AS(load_manifest(path),
                         doctest::Contains("holds no segments"), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_manifest(tmp.file("absent.csv")), DataError);
  }
}

TEST_CASE("manifest save and reload round trip") {
  TempDir tmp("dataset_manifest_rt");
  std::vector<SegmentRecord> records(2);
  records[0].segment_id = "a001";
  records[0].path = tmp.file("segments/a001.feat");
  records[0].low_class = "beach";
  records[0].fold = 1;
  records[1].segment_id = "b002";
  records[1].path = tmp.file("segments/b002.feat");
  records[1].low_class = "car";
  records[1].fold = 4;

  const std::string path = tmp.file("manifest.csv");
  save_manifest(records, path);

  // Paths under the manifest directory are stored relative to it.
  const std::vector<std::string> lines = read_lines(path);
  REQUIRE_EQ(lines.size(), 3);
  CHECK_EQ(lines[0], "segment_path,low_class,fold");
  CHECK_EQ(lines[1], "segments/a001.feat,beach,1");

  const std::vector<SegmentRecord> loaded = load_manifest(path);
  REQUIRE_EQ(loaded.size(), 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK_EQ(loaded[i].segment_id, records[i].segment_id);
    CHECK_EQ(loaded[i].path,
             std::filesystem::path(records[i].path).lexically_normal()
                 .string());
    CHECK_EQ(loaded[i].low_class, records[i].low_class);
    CHECK_EQ(loaded[i].fold, records[i].fold);
  }
}

TEST_CASE("streaming stats match the two-pass computation") {
  Rng rng(42);
  const Mat<float> a = random_features(31, 5, rng);
  const Mat<float> b = random_features(17, 5, rng);
  const Mat<float> c = random_features(23, 5, rng);

  StatsAccumulator acc(5);
  acc.add(a);
  acc.add(b);
  acc.add(c);
  CHECK_EQ(acc.count(), 71);
  const NormStats streamed = acc.finalize();

  Mat<float> all(71, 5);
  size_t r = 0;
  for (const Mat<float>* m : {&a, &b, &c}) {
    for (size_t i = 0; i < m->rows(); ++i, ++r) {
      for (size_t d = 0; d < 5; ++d) all(r, d) = (*m)(i, d);
    }
  }
  const NormStats two_pass = compute_norm_stats(all);

  for (size_t d = 0; d < 5; ++d) {
    CHECK(streamed.mean[d] == doctest::Approx(two_pass.mean[d]).epsilon(1e-9));
    CHECK(streamed.stddev[d] ==
          doctest::Approx(two_pass.stddev[d]).epsilon(1e-9));
  }
}

TEST_CASE("stats accumulator guards its invariants") {
  CHECK_THROWS_AS(StatsAccumulator(0), DataError);
  StatsAccumulator acc(3);
  CHECK_THROWS_AS(acc.add(Mat<float>(2, 4, 0.0f)), DataError);
  CHECK_THROWS_AS(acc.finalize(), DataError);  // no rows yet

  acc.add(Mat<float>(4, 3, 2.0f));
  const NormStats stats = acc.finalize();
  CHECK_EQ(stats.mean[0], 2.0);
  CHECK_EQ(stats.stddev[0], kStddevFloor);  // constant dimension floored
}

TEST_CASE("load_stacked_segment equals read-then-stack") {
  TempDir tmp("dataset_stacked");
  Rng rng(3);
  const Mat<float> raw = random_features(9, 4, rng);
  const std::string path = tmp.file("seg.feat");
  write_feature_file(path, raw);

  SegmentRecord record;
  record.segment_id = "seg";
  record.path = path;
  record.low_class = "beach";

  const Mat<float> direct = load_stacked_segment(record, 3);
  CHECK(direct == stack_context(raw, 3));
  const Mat<float> unstacked = load_stacked_segment(record, 1);
  CHECK(unstacked == raw);
}

TEST_CASE("compute_stats_for_records pools stacked frames") {
  TempDir tmp("dataset_stats");
  Rng rng(8);
  std::vector<SegmentRecord> records(2);
  Mat<float> concat;
  std::vector<Mat<float>> stacked;
  for (size_t i = 0; i < 2; ++i) {
    const Mat<float> raw = random_features(6 + i, 3, rng);
    const std::string path = tmp.file("s" + std::to_string(i) + ".feat");
    write_feature_file(path, raw);
    records[i].segment_id = "s" + std::to_string(i);
    records[i].path = path;
    records[i].low_class = "car";
    stacked.push_back(stack_context(raw, 3));
  }

  const NormStats stats = compute_stats_for_records(records, 3);
  StatsAccumulator acc(9);
  for (const auto& m : stacked) acc.add(m);
  const NormStats expected = acc.finalize();
  CHECK(stats.mean == expected.mean);
  CHECK(stats.stddev == expected.stddev);

  CHECK_THROWS_AS(compute_stats_for_records({}, 3), DataError);
}

TEST_CASE("assemble_frame_dataset stitches segments with labels") {
  TempDir tmp("dataset_assemble");
  const Taxonomy tax = Taxonomy::dcase2016();
  Rng rng(15);

  std::vector<SegmentRecord> records(3);
  const char* classes[3] = {"beach", "car", "home"};
  const size_t lengths[3] = {5, 4, 6};
  std::vector<Mat<float>> raw(3);
  for (size_t i = 0; i < 3; ++i) {
    raw[i] = random_features(lengths[i], 4, rng);
    const std::string path = tmp.file("seg" + std::to_string(i) + ".feat");
    write_feature_file(path, raw[i]);
    records[i].segment_id = "seg" + std::to_string(i);
    records[i].path = path;
    records[i].low_class = classes[i];
    records[i].fold = 1;
  }

  const NormStats stats = compute_stats_for_records(records, 1);
  const FrameDataset data = assemble_frame_dataset(records, tax, stats, 1);

  REQUIRE_EQ(data.num_frames(), 15);
  REQUIRE_EQ(data.num_segments(), 3);
  const std::vector<size_t> begins{0, 5, 9, 15};
  CHECK(data.segment_begin == begins);

  for (size_t i = 0; i < 3; ++i) {
    const int low = tax.low_index(classes[i]);
    const int high = tax.parent_of(low);
    for (size_t f = data.segment_begin[i]; f < data.segment_begin[i + 1];
         ++f) {
      CHECK_EQ(data.low_labels[f], low);
      CHECK_EQ(data.high_labels[f], high);
    }
  }

  // Normalization applied: replicate for one frame of the second segment.
  Mat<float> expected = raw[1];
  normalize_inplace(expected, stats);
  for (size_t d = 0; d < 4; ++d) {
    CHECK_EQ(data.features(5, d), expected(0, d));
  }
}

TEST_CASE("assemble_frame_dataset rejects inconsistent input") {
  TempDir tmp("dataset_assemble_bad");
  const Taxonomy tax = Taxonomy::dcase2016();
  Rng rng(25);

  const Mat<float> raw = random_features(4, 3, rng);
  const std::string path = tmp.file("seg.feat");
  write_feature_file(path, raw);
  SegmentRecord record;
  record.segment_id = "seg";
  record.path = path;
  record.low_class = "beach";
  const NormStats stats = compute_stats_for_records({record}, 1);

  SUBCASE("unknown class name") {
    SegmentRecord bad = record;
    bad.low_class = "spaceship";
    CHECK_THROWS_WITH_AS(assemble_frame_dataset({bad}, tax, stats, 1),
                         doctest::Contains("unknown"), DataError);
  }
  SUBCASE("stats dimension mismatch") {
    NormStats wrong;
    wrong.mean = {0.0, 0.0};
    wrong.stddev = {1.0, 1.0};
    CHECK_THROWS_AS(assemble_frame_dataset({record}, tax, wrong, 1),
                    DataError);
  }
  SUBCASE("cross-file dimension mismatch") {
    const Mat<float> other = random_features(4, 5, rng);
    const std::string path2 = tmp.file("seg2.feat");
    write_feature_file(path2, other);
    SegmentRecord second = record;
    second.segment_id = "seg2";
    second.path = path2;
    CHECK_THROWS_AS(assemble_frame_dataset({record, second}, tax, stats, 1),
                    DataError);
  }
  SUBCASE("empty record list") {
    CHECK_THROWS_AS(assemble_frame_dataset({}, tax, stats, 1), DataError);
  }
}
