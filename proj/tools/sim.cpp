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

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cavsim/experiments.hpp"
#include "cavsim/types.hpp"

using cavsim::ConfigError;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int list_experiments(bool as_json) {
  const auto& reg = cavsim::experiment_registry();
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : reg) {
      out.push_back({{"name", e.name}, {"description", e.description}, {"section", e.section}, {"outputs", e.outputs}});
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& e : reg) {
    std::printf("%-18s %s\n", e.name.c_str(), e.description.c_str());
    std::printf("%-18s   section: \"%s\"\n", "", e.section.c_str());
  }
  return kOk;
}

int validate(const std::string& path) {
  try {
    auto cfg = cavsim::load_config(path);
    cavsim::validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  std::printf("%s: ok\n", path.c_str());
  return kOk;
}

int run(const std::string& path, const std::string& out, int workers) {
  nlohmann::json cfg;
  std::string name = "?";
  try {
    cfg = cavsim::load_config(path);
    cavsim::validate_config(cfg);
    name = cfg.at("experiment").get<std::string>();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  try {
    cavsim::RunOptions o;
    o.out_dir = out;
    o.workers = workers;
    auto r = cavsim::run_experiment(cfg, o);
    std::printf("%s: wrote %zu files to %s (%.2f s)\n", name.c_str(), r.files.size(), r.out_dir.c_str(), r.wall_time);
    return kOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error in experiment '%s': %s\n", name.c_str(), e.what());
    return kNumericalError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity qudit simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CAVSIM_VERSION));

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string cfg_path, out_dir;
  int workers = 0;
  run_cmd->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory (default: SIM_OUTPUT_DIR/<experiment> or ./results/<experiment>)");
  run_cmd->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  auto* list_cmd = app.add_subcommand("list-experiments", "List registered experiments");
  bool as_json = false;
  list_cmd->add_flag("--json", as_json, "Machine-readable output");

  auto* val_cmd = app.add_subcommand("validate", "Check a config without running it");
  std::string val_path;
  val_cmd->add_option("config", val_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  if (*run_cmd) return run(cfg_path, out_dir, workers);
  if (*list_cmd) return list_experiments(as_json);
  return validate(val_path);
}
