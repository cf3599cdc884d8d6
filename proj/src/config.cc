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

#include "asc/config.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
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

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string absolute_or_empty(const std::string& path) {
  if (path.empty()) return path;
  return std::filesystem::absolute(path).lexically_normal().string();
}

}  // namespace

std::string format_hidden(const std::vector<size_t>& dims) {
  std::ostringstream os;
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  return os.str();
}

std::vector<size_t> parse_hidden(const std::string& text) {
  std::vector<size_t> dims;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    field = trim(field);
    const int v = parse_int("hidden", field);
    if (v < 1) throw ConfigError("hidden: layer sizes must be >= 1");
    dims.push_back(static_cast<size_t>(v));
  }
  if (dims.empty()) throw ConfigError("hidden: expected at least one size");
  return dims;
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "manifest") cfg.manifest = value;
  else if (key == "taxonomy") cfg.taxonomy = value;
  else if (key == "fold") cfg.fold = parse_int(key, value);
  else if (key == "stage") cfg.stage = value;
  else if (key == "epochs") cfg.epochs = parse_int(key, value);
  else if (key == "batch_size") cfg.batch_size = parse_int(key, value);
  else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "momentum") cfg.momentum = parse_double(key, value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "dropout_input") cfg.dropout_input = parse_double(key, value);
  else if (key == "dropout_hidden")
    cfg.dropout_hidden = parse_double(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "init_model") cfg.init_model = value;
  else if (key == "out") cfg.out = value;
  else if (key == "context") cfg.context = parse_int(key, value);
  else if (key == "mel") cfg.mel = parse_int(key, value);
  else if (key == "hidden") cfg.hidden = parse_hidden(value);
  else if (key == "early_stop") cfg.early_stop = parse_bool(key, value);
  else if (key == "stats") cfg.stats = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    const size_t eq = row.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    apply_config_entry(base, trim(row.substr(0, eq)),
                       trim(row.substr(eq + 1)));
  }
  return base;
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (manifest.empty()) problems.push_back("manifest must be set");
  if (out.empty()) problems.push_back("out must name the output model path");
  if (fold < 0) problems.push_back("fold must be >= 0");
  if (stage != "dnn1" && stage != "dnn2" && stage != "dnn3" &&
      stage != "baseline") {
    problems.push_back("stage must be one of dnn1, dnn2, dnn3, baseline");
  }
  if (epochs < 0) problems.push_back("epochs must be >= 0");
  if (batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    problems.push_back("lr must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    problems.push_back("momentum must lie in [0, 1)");
  }
  if (alpha < 0.0 || alpha > 1.0) problems.push_back("alpha must lie in [0, 1]");
  if (dropout_input < 0.0 || dropout_input >= 1.0) {
    problems.push_back("dropout_input must lie in [0, 1)");
  }
  if (dropout_hidden < 0.0 || dropout_hidden >= 1.0) {
    problems.push_back("dropout_hidden must lie in [0, 1)");
  }
  if (context < 1 || context % 2 == 0) {
    problems.push_back("context must be an odd positive integer");
  }
  if (mel < 1) problems.push_back("mel must be >= 1");
  if (hidden.empty()) problems.push_back("hidden must name at least one layer");
  if ((stage == "dnn2" || stage == "dnn3") && init_model.empty()) {
    problems.push_back("stage " + stage +
                       " needs --init-model (use baseline for random init)");
  }
  if (!problems.empty()) {
    std::string all = "invalid configuration:";
    for (const auto& p : problems) all += "\n  - " + p;
    throw ConfigError(all);
  }
}

void save_run_manifest(const RunConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open run manifest for writing: " + path);
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "manifest=" << absolute_or_empty(cfg.manifest) << "\n";
  os << "taxonomy=" << absolute_or_empty(cfg.taxonomy) << "\n";
  os << "fold=" << cfg.fold << "\n";
  os << "stage=" << cfg.stage << "\n";
  os << "epochs=" << cfg.epochs << "\n";
  os << "batch_size=" << cfg.batch_size << "\n";
  os << "lr=" << num(cfg.lr) << "\n";
  os << "momentum=" << num(cfg.momentum) << "\n";
  os << "alpha=" << num(cfg.alpha) << "\n";
  os << "dropout_input=" << num(cfg.dropout_input) << "\n";
  os << "dropout_hidden=" << num(cfg.dropout_hidden) << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "init_model=" << absolute_or_empty(cfg.init_model) << "\n";
  os << "out=" << absolute_or_empty(cfg.out) << "\n";
  os << "context=" << cfg.context << "\n";
  os << "mel=" << cfg.mel << "\n";
  os << "hidden=" << format_hidden(cfg.hidden) << "\n";
  os << "early_stop=" << (cfg.early_stop ? "true" : "false") << "\n";
  os << "stats=" << absolute_or_empty(cfg.stats) << "\n";
  if (!os) throw DataError("failed writing run manifest: " + path);
}

}  // namespace asc
