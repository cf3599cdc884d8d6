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

#ifndef ASC_LOGGING_H_
#define ASC_LOGGING_H_

#include <sstream>
#include <string>

namespace asc {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from HIERACOUSTIC_LOG={error,info,debug}; default info.
LogLevel log_level();

void log_message(LogLevel level, const std::string& message);

template <typename... Args>
void log_info(const Args&... args) {
  if (log_level() < LogLevel::kInfo) return;
  std::ostringstream os;
  (os << ... << args);
  log_message(LogLevel::kInfo, os.str());
}

template <typename... Args>
void log_debug(const Args&... args) {
  if (log_level() < LogLevel::kDebug) return;
  std::ostringstream os;
  (os << ... << args);
  log_message(LogLevel::kDebug, os.str());
}

template <typename... Args>
void log_error(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  log_message(LogLevel::kError, os.str());
}

}  // namespace asc

#endif  // ASC_LOGGING_H_
