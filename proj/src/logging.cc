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

#include "asc/logging.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace asc {

static LogLevel parse_level_from_env() {
  const char* env = std::getenv("HIERACOUSTIC_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  if (std::strcmp(env, "error") == 0) return LogLevel::kError;
  if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
  return LogLevel::kInfo;
}

LogLevel log_level() {
  static const LogLevel level = parse_level_from_env();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  const char* tag = "INFO";
  if (level == LogLevel::kError) tag = "ERROR";
  if (level == LogLevel::kDebug) tag = "DEBUG";
  std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

}  // namespace asc
