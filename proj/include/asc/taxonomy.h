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

#ifndef ASC_TAXONOMY_H_
#define ASC_TAXONOMY_H_

#include <string>
#include <vector>

namespace asc {

/// Two-level scene hierarchy: every low-level class has exactly one
/// high-level parent, and the child sets partition the low-level classes.
class Taxonomy {
 public:
  /// The DCASE 2016 scene hierarchy: 15 scenes grouped into indoor,
  /// outdoor, and vehicle (6/5/4 children respectively).
  static Taxonomy dcase2016();

  /// Loads a CSV with header `low,high`; row order defines low-class index
  /// order, and high classes are indexed by first appearance. Throws
  /// DataError for duplicate lows, missing parents, or unreadable files.
  static Taxonomy from_csv(const std::string& path);

  /// Builds from parallel name/parent lists; validates the invariants.
  Taxonomy(std::vector<std::string> low_names,
           std::vector<std::string> high_names, std::vector<int> parent);

  int num_low() const { return static_cast<int>(low_names_.size()); }
  int num_high() const { return static_cast<int>(high_names_.size()); }

  /// Parent high-class index of a low class; range-checked.
  int parent_of(int low_index) const;

  const std::string& low_name(int index) const;
  const std::string& high_name(int index) const;
  const std::vector<std::string>& low_names() const { return low_names_; }
  const std::vector<std::string>& high_names() const { return high_names_; }

  /// Index of a low class by name, or -1.
  int low_index(const std::string& name) const;

  /// Index of a high class by name, or -1.
  int high_index(const std::string& name) const;

  /// Writes the `low,high` CSV form.
  void save_csv(const std::string& path) const;

 private:
  std::vector<std::string> low_names_;
  std::vector<std::string> high_names_;
  std::vector<int> parent_;
};

/// Paired one-hot targets for the two network heads.
struct LabelTarget {
  std::vector<float> low_onehot;   // size num_low
  std::vector<float> high_onehot;  // size num_high
};

/// Lifts a low-level one-hot to its LabelTarget; the high one-hot marks the
/// parent of the active low class. Throws DataError for non-one-hot input.
LabelTarget lift_target(const std::vector<float>& low_onehot,
                        const Taxonomy& taxonomy);

}  // namespace asc

#endif  // ASC_TAXONOMY_H_
