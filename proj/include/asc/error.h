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

#ifndef ASC_ERROR_H_
#define ASC_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace asc {

/// Bad flags, bad config files, inconsistent settings. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or missing input data (WAV, manifests, feature/model files).
/// CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A broken internal invariant. CLI exit code 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

namespace detail {
[[noreturn]] inline void check_failed(const char* expr, const char* file,
                                      int line, const std::string& msg) {
  std::ostringstream os;
  os << "check failed: " << expr << " at " << file << ":" << line;
  if (!msg.empty()) os << " (" << msg << ")";
  throw InternalError(os.str());
}
}  // namespace detail

}  // namespace asc

// Invariant check; condition must hold regardless of user input.
#define ASC_CHECK(cond, msg)                                     \
  do {                                                           \
    if (!(cond)) {                                               \
      ::asc::detail::check_failed(#cond, __FILE__, __LINE__, msg); \
    }                                                            \
  } while (0)

#endif  // ASC_ERROR_H_
