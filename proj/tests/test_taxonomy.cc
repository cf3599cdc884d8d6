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
#include <string>
#include <vector>

#include "asc/error.h"
#include "asc/taxonomy.h"
#include "doctest.h"
#include "testing_util.h"

using namespace asc;
using namespace asc::testing;

TEST_CASE("dcase2016 taxonomy shape") {
  const Taxonomy tax = Taxonomy::dcase2016();
  CHECK_EQ(tax.num_low(), 15);
  CHECK_EQ(tax.num_high(), 3);

  // Group sizes: six indoor, five outdoor, four vehicle.
  std::vector<int> counts(3, 0);
  for (int c = 0; c < tax.num_low(); ++c) ++counts[tax.parent_of(c)];
  CHECK_EQ(counts[tax.high_index("indoor")], 6);
  CHECK_EQ(counts[tax.high_index("outdoor")], 5);
  CHECK_EQ(counts[tax.high_index("vehicle")], 4);
}

TEST_CASE("dcase2016 parent assignments") {
  const Taxonomy tax = Taxonomy::dcase2016();
  const int indoor = tax.high_index("indoor");
  const int outdoor = tax.high_index("outdoor");
  const int vehicle = tax.high_index("vehicle");
  REQUIRE_EQ(indoor, 0);
  REQUIRE_EQ(outdoor, 1);
  REQUIRE_EQ(vehicle, 2);

  auto parent = [&](const std::string& name) {
    const int low = tax.low_index(name);
    REQUIRE(low >= 0);
    return tax.parent_of(low);
  };
  CHECK_EQ(parent("car"), vehicle);
  CHECK_EQ(parent("bus"), vehicle);
  CHECK_EQ(parent("train"), vehicle);
  CHECK_EQ(parent("tram"), vehicle);
  CHECK_EQ(parent("home"), indoor);
  CHECK_EQ(parent("library"), indoor);
  CHECK_EQ(parent("office"), indoor);
  CHECK_EQ(parent("cafe_restaurant"), indoor);
  CHECK_EQ(parent("grocery_store"), indoor);
  CHECK_EQ(parent("metro_station"), indoor);
  CHECK_EQ(parent("beach"), outdoor);
  CHECK_EQ(parent("urban_park"), outdoor);
  CHECK_EQ(parent("city_center"), outdoor);
  CHECK_EQ(parent("forest_path"), outdoor);
  CHECK_EQ(parent("residential_area"), outdoor);
}

TEST_CASE("name and index lookups round-trip") {
  const Taxonomy tax = Taxonomy::dcase2016();
  for (int c = 0; c < tax.num_low(); ++c) {
    CHECK_EQ(tax.low_index(tax.low_name(c)), c);
  }
  for (int g = 0; g < tax.num_high(); ++g) {
    CHECK_EQ(tax.high_index(tax.high_name(g)), g);
  }
  CHECK_EQ(tax.low_index("no_such_scene"), -1);
  CHECK_EQ(tax.high_index("no_such_group"), -1);
}

TEST_CASE("lift_target maps a one-hot low label to its parent group") {
  const Taxonomy tax = Taxonomy::dcase2016();
  const int car = tax.low_index("car");

  std::vector<float> low(15, 0.0f);
  low[car] = 1.0f;
  const LabelTarget target = lift_target(low, tax);
  CHECK(target.low_onehot == low);
  REQUIRE_EQ(target.high_onehot.size(), 3);
  for (int g = 0; g < 3; ++g) {
    CHECK_EQ(target.high_onehot[g],
             g == tax.high_index("vehicle") ? 1.0f : 0.0f);
  }

  SUBCASE("rejects non-one-hot input") {
    std::vector<float> zeros(15, 0.0f);
    CHECK_THROWS_WITH_AS(lift_target(zeros, tax),
                         doctest::Contains("not one-hot"), DataError);
    std::vector<float> two(15, 0.0f);
    two[0] = 1.0f;
    two[5] = 1.0f;
    CHECK_THROWS_AS(lift_target(two, tax), DataError);
    std::vector<float> soft(15, 0.0f);
    soft[3] = 0.5f;
    CHECK_THROWS_AS(lift_target(soft, tax), DataError);
    std::vector<float> wrong_size(14, 0.0f);
    wrong_size[0] = 1.0f;
    CHECK_THROWS_AS(lift_target(wrong_size, tax), DataError);
  }
}

TEST_CASE("taxonomy constructor validates its tables") {
  SUBCASE("duplicate low class") {
    CHECK_THROWS_WITH_AS(
        Taxonomy({"a", "b", "a"}, {"g"}, {0, 0, 0}),
        doctest::Contains("duplicate low class"), DataError);
  }
  SUBCASE("childless high class") {
    CHECK_THROWS_WITH_AS(Taxonomy({"a", "b"}, {"g0", "g1"}, {0, 0}),
                         doctest::Contains("has no children"), DataError);
  }
  SUBCASE("parent index out of range") {
    CHECK_THROWS_AS(Taxonomy({"a", "b"}, {"g"}, {0, 1}), DataError);
    CHECK_THROWS_AS(Taxonomy({"a", "b"}, {"g"}, {0, -1}), DataError);
  }
  SUBCASE("empty tables") {
    CHECK_THROWS_AS(Taxonomy({}, {}, {}), DataError);
  }
  SUBCASE("parent list length mismatch") {
    CHECK_THROWS_AS(Taxonomy({"a", "b"}, {"g"}, {0}), DataError);
  }
}

TEST_CASE("taxonomy csv round trip") {
  TempDir tmp("taxonomy_csv");
  const std::string path = tmp.file("tax.csv");
  const Taxonomy tax = Taxonomy::dcase2016();
  tax.save_csv(path);

  const Taxonomy loaded = Taxonomy::from_csv(path);
  CHECK_EQ(loaded.num_low(), tax.num_low());
  CHECK_EQ(loaded.num_high(), tax.num_high());
  // Reloading indexes high classes by first appearance, so the parent
  // relation must survive by name even if the coarse indices permute.
  for (int c = 0; c < tax.num_low(); ++c) {
    CHECK_EQ(loaded.low_name(c), tax.low_name(c));
    CHECK_EQ(loaded.high_name(loaded.parent_of(c)),
             tax.high_name(tax.parent_of(c)));
  }
  for (int g = 0; g < tax.num_high(); ++g) {
    CHECK(loaded.high_index(tax.high_name(g)) >= 0);
  }
}

TEST_CASE("csv high classes are indexed by first appearance") {
  TempDir tmp("taxonomy_order");
  const std::string path = tmp.file("tax.csv");
  write_text(path, "a,G2\nb,G1\nc,G2\n");

  const Taxonomy tax = Taxonomy::from_csv(path);
  REQUIRE_EQ(tax.num_high(), 2);
  CHECK_EQ(tax.high_name(0), "G2");
  CHECK_EQ(tax.high_name(1), "G1");
  CHECK_EQ(tax.parent_of(tax.low_index("a")), 0);
  CHECK_EQ(tax.parent_of(tax.low_index("b")), 1);
  CHECK_EQ(tax.parent_of(tax.low_index("c")), 0);
}

TEST_CASE("csv header row is optional") {
  TempDir tmp("taxonomy_header");
  const std::string with_header = tmp.file("with.csv");
  const std::string without = tmp.file("without.csv");
  write_text(with_header, "low,high\nbeach,outdoor\ncar,vehicle\n");
  write_text(without, "beach,outdoor\ncar,vehicle\n");

  const Taxonomy a = Taxonomy::from_csv(with_header);
  const Taxonomy b = Taxonomy::from_csv(without);
  CHECK_EQ(a.num_low(), 2);
  CHECK_EQ(b.num_low(), 2);
  CHECK_EQ(a.low_name(0), b.low_name(0));
  CHECK_EQ(a.high_name(0), "outdoor");
}

TEST_CASE("csv parse errors") {
  TempDir tmp("taxonomy_bad");

  SUBCASE("missing separator") {
    const std::string path = tmp.file("sep.csv");
    write_text(path, "beach outdoor\n");
    CHECK_THROWS_AS(Taxonomy::from_csv(path), DataError);
  }
  SUBCASE("empty low name") {
    const std::string path = tmp.file("empty_low.csv");
    write_text(path, ",outdoor\n");
    CHECK_THROWS_AS(Taxonomy::from_csv(path), DataError);
  }
  SUBCASE("file with no rows") {
    const std::string path = tmp.file("empty.csv");
    write_text(path, "");
    CHECK_THROWS_AS(Taxonomy::from_csv(path), DataError);
  }
  SUBCASE("nonexistent file") {
    CHECK_THROWS_AS(Taxonomy::from_csv(tmp.file("absent.csv")), DataError);
  }
}
