// Copyright 2026 The cavsim Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cavsim {

// Schema or parse problem; `where` is a field path or "line:column".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::invalid_argument(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string section;  // name of the experiment-specific config object
  std::vector<std::string> outputs;
};

const std::vector<ExperimentInfo>& experiment_registry();
std::vector<std::string> experiment_names();
const ExperimentInfo& experiment_info(const std::string& name);

// JSON with // and /* */ comments.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config(const std::string& path);
// Full schema check (unknown keys, types, ranges); throws ConfigError.
void validate_config(const nlohmann::json& cfg);

// Ready-to-run configuration; quick shrinks it to a few seconds.
nlohmann::json example_config(const std::string& name, bool quick = false);

// FNV-1a of the canonical serialization.
std::string config_hash(const nlohmann::json& cfg);

struct RunOptions {
  std::string out_dir;  // empty: config "output_dir", then SIM_OUTPUT_DIR, then "./results/<experiment>"
  int workers = 0;      // 0: config "workers" (default 1)
};

struct RunResult {
  std::string out_dir;
  std::vector<std::string> tables;  // CSV files, relative to out_dir
  std::vector<std::string> files;   // everything written, manifest last
  nlohmann::json summary;
  double wall_time = 0.0;
};

// Computes everything first and writes only on success.
RunResult run_experiment(const nlohmann::json& cfg, const RunOptions& opt = {});

}  // namespace cavsim
