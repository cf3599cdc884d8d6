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

#include "asc/taxonomy.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "asc/error.h"

namespace asc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Taxonomy::Taxonomy(std::vector<std::string> low_names,
                   std::vector<std::string> high_names,
                   std::vector<int> parent)
    : low_names_(std::move(low_names)),
      high_names_(std::move(high_names)),
      parent_(std::move(parent)) {
  if (low_names_.empty() || high_names_.empty()) {
    throw DataError("taxonomy must have at least one low and one high class");
  }
  if (parent_.size() != low_names_.size()) {
    throw DataError("taxonomy parent map size mismatch");
  }
  std::set<std::string> seen_low;
  for (const auto& name : low_names_) {
    if (!seen_low.insert(name).second) {
      throw DataError("duplicate low class in taxonomy: " + name);
    }
  }
  std::vector<int> child_counts(high_names_.size(), 0);
  for (size_t i = 0; i < parent_.size(); ++i) {
    if (parent_[i] < 0 || parent_[i] >= num_high()) {
      throw DataError("low class " + low_names_[i] +
                      " has an out-of-range parent");
    }
    ++child_counts[parent_[i]];
  }
  for (size_t k = 0; k < child_counts.size(); ++k) {
    if (child_counts[k] == 0) {
      throw DataError("high class " + high_names_[k] + " has no children");
    }
  }
}

Taxonomy Taxonomy::dcase2016() {
  // Scene order fixed as C1..C15 so confusion matrices line up across runs.
  const std::vector<std::string> low = {
      "beach",         "bus",      "cafe_restaurant", "car",
      "city_center",   "forest_path", "grocery_store", "home",
      "library",       "metro_station", "office",      "urban_park",
      "residential_area", "train",  "tram"};
  const std::vector<std::string> high = {"indoor", "outdoor", "vehicle"};
  // indoor: cafe, grocery, home, library, metro, office
  // outdoor: beach, city center, forest path, park, residential area
  // vehicle: bus, car, train, tram
  const std::vector<int> parent = {1, 2, 0, 2, 1, 1, 0, 0, 0, 0, 0, 1, 1, 2, 2};
  return Taxonomy(low, high, parent);
}

Taxonomy Taxonomy::from_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open taxonomy file: " + path);

  std::vector<std::string> low_names;
  std::vector<std::string> high_names;
  std::vector<int> parent;

  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("taxonomy row missing parent: \"" + line + "\" in " +
                      path);
    }
    const std::string low = trim(line.substr(0, comma));
    const std::string high = trim(line.substr(comma + 1));
    if (first && low == "low" && high == "high") {
      first = false;
      continue;  // header
    }
    first = false;
    if (low.empty()) throw DataError("empty low class name in " + path);
    if (high.empty()) {
      throw DataError("low class " + low + " missing parent in " + path);
    }
    auto it = std::find(high_names.begin(), high_names.end(), high);
    int high_index;
    if (it == high_names.end()) {
      high_index = static_cast<int>(high_names.size());
      high_names.push_back(high);
    } else {
      high_index = static_cast<int>(it - high_names.begin());
    }
    low_names.push_back(low);
    parent.push_back(high_index);
  }
  if (low_names.empty()) throw DataError("taxonomy file is empty: " + path);
  return Taxonomy(std::move(low_names), std::move(high_names),
                  std::move(parent));
}

int Taxonomy::parent_of(int low_index) const {
  if (low_index < 0 || low_index >= num_low()) {
    throw DataError("low class index " + std::to_string(low_index) +
                    " out of range [0, " + std::to_string(num_low()) + ")");
  }
  return parent_[low_index];
}

const std::string& Taxonomy::low_name(int index) const {
  if (index < 0 || index >= num_low()) {
    throw DataError("low class index out of range: " + std::to_string(index));
  }
  return low_names_[index];
}

const std::string& Taxonomy::high_name(int index) const {
  if (index < 0 || index >= num_high()) {
    throw DataError("high class index out of range: " + std::to_string(index));
  }
  return high_names_[index];
}

int Taxonomy::low_index(const std::string& name) const {
  const auto it = std::find(low_names_.begin(), low_names_.end(), name);
  return it == low_names_.end()
             ? -1
             : static_cast<int>(it - low_names_.begin());
}

int Taxonomy::high_index(const std::string& name) const {
  const auto it = std::find(high_names_.begin(), high_names_.end(), name);
  return it == high_names_.end()
             ? -1
             : static_cast<int>(it - high_names_.begin());
}

void Taxonomy::save_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write taxonomy file: " + path);
  os << "low,high\n";
  for (int i = 0; i < num_low(); ++i) {
    os << low_names_[i] << "," << high_names_[parent_[i]] << "\n";
  }
  if (!os) throw DataError("failed writing taxonomy file: " + path);
}

LabelTarget lift_target(const std::vector<float>& low_onehot,
                        const Taxonomy& taxonomy) {
  if (low_onehot.size() != static_cast<size_t>(taxonomy.num_low())) {
    throw DataError("one-hot size does not match taxonomy");
  }
  int active = -1;
  for (size_t j = 0; j < low_onehot.size(); ++j) {
    if (low_onehot[j] == 0.0f) continue;
    if (low_onehot[j] != 1.0f || active != -1) {
      throw DataError("input is not one-hot");
    }
    active = static_cast<int>(j);
  }
  if (active == -1) throw DataError("input is not one-hot");

  LabelTarget target;
  target.low_onehot = low_onehot;
  target.high_onehot.assign(taxonomy.num_high(), 0.0f);
  target.high_onehot[taxonomy.parent_of(active)] = 1.0f;
  return target;
}

}  // namespace asc
