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

#ifndef ASC_CONFIG_H_
#define ASC_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

// Flat key=value run configuration. A config file preloads the settings and
// command-line flags overwrite individual fields, so flags always win. Every
// resolved run echoes its settings to a run-manifest file that is itself a
// loadable config.

namespace asc {

struct RunConfig {
  std::string manifest;
  std::string taxonomy;  // empty selects the built-in hierarchy
  int fold = 1;          // 0 trains on everything with no held-out fold
  std::string stage = "dnn2";
  int epochs = 30;
  int batch_size = 128;
  double lr = 0.005;
  double momentum = 0.9;
  double alpha = 0.6;
  double dropout_input = 0.1;
  double dropout_hidden = 0.3;
  uint64_t seed = 0;
  std::string init_model;
  std::string out;
  int context = 11;
  int mel = 40;
  std::vector<size_t> hidden = {500, 500};
  bool early_stop = false;
  std::string stats;  // normalization stats file; empty recomputes

  /// Collects every violation and throws one ConfigError listing them all.
  void validate() const;
};

/// "500,500" <-> {500, 500}.
std::string format_hidden(const std::vector<size_t>& dims);
std::vector<size_t> parse_hidden(const std::string& text);

/// Applies one key=value pair. Unknown keys and malformed values throw
/// ConfigError.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

/// Loads key=value lines (# comments and blanks skipped) on top of `base`.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Writes every resolved setting, paths made absolute, doubles at full
/// precision. Loading the file back reproduces the configuration exactly.
void save_run_manifest(const RunConfig& cfg, const std::string& path);

}  // namespace asc

#endif  // ASC_CONFIG_H_
