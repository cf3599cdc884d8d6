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

#ifndef ASC_RNG_H_
#define ASC_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace asc {

// Seeded random source. Variates are derived from raw mt19937 words rather
// than std::*_distribution, so a given seed yields the same stream on every
// platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(static_cast<std::mt19937::result_type>(seed)) {}

  uint32_t next_u32() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return next_u32() * (1.0 / 4294967296.0); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard log(0).
    if (u1 <= 0.0) u1 = 1.0 / 4294967296.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Integer in [0, n), n > 0. Fixed-point multiply keeps it platform-stable.
  uint32_t below(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<uint64_t>(next_u32()) * n) >> 32);
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = below(static_cast<uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace asc

#endif  // ASC_RNG_H_
