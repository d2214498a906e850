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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cavsim/experiments.hpp"
#include "cavsim/types.hpp"
#include "doctest.h"

using namespace cavsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "cavsim_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_where(const json& cfg) {
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "<valid>";
}

}  // namespace

TEST_CASE("registry") {
  auto names = experiment_names();
  CHECK(names.size() == experiment_registry().size());
  for (const auto& n : names) {
    CHECK(experiment_info(n).name == n);
    CHECK_FALSE(experiment_info(n).outputs.empty());
    CHECK_NOTHROW(validate_config(example_config(n)));
    CHECK_NOTHROW(validate_config(example_config(n, true)));
  }
  CHECK_THROWS_AS(experiment_info("nope"), std::invalid_argument);
}

TEST_CASE("config parsing and schema") {
  json c = parse_config_text(R"({
    // comment
    "experiment": "limits", /* block */ "seed": 3, "limits": {}
  })");
  CHECK_NOTHROW(validate_config(c));
  try {
    parse_config_text("{\n  \"seed\": 1,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(e.where().rfind("3:", 0) == 0);
  }

  json no_seed = c;
  no_seed.erase("seed");
  CHECK(config_error_where(no_seed) == "seed");
  json unknown = c;
  unknown["limits"]["bogus"] = 1;
  CHECK(config_error_where(unknown) == "limits.bogus");
  json bad_exp = c;
  bad_exp["experiment"] = "nope";
  CHECK(config_error_where(bad_exp) == "experiment");
  json bad_type = example_config("fock-prep", true);
  bad_type["fock_prep"]["targets"] = "three";
  CHECK(config_error_where(bad_type) == "fock_prep.targets");
  json bad_param = c;
  bad_param["params"]["T1_A"] = -1.0;
  CHECK(config_error_where(bad_param).rfind("params", 0) == 0);
  json bad_range = example_config("vrbs-swap", true);
  bad_range["vrbs_swap"]["n_swaps"] = 0;
  CHECK(config_error_where(bad_range) == "vrbs_swap.n_swaps");
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("config hash") {
  json a = json::parse(R"({"experiment":"limits","seed":1,"limits":{}})");
  json b = json::parse(R"({"limits":{},"seed":1,"experiment":"limits"})");
  CHECK(config_hash(a) == config_hash(b));
  b["seed"] = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("run writes tables and a manifest") {
  fs::path out = scratch("limits");
  RunOptions o;
  o.out_dir = out.string();
  auto r = run_experiment(example_config("limits", true), o);
  REQUIRE_FALSE(r.files.empty());
  CHECK(r.files.back() == "manifest.json");
  for (const auto& f : r.files) CHECK(fs::exists(out / f));
  json m = json::parse(slurp(out / "manifest.json"));
  CHECK(m.at("seed") == 1234);
  CHECK(m.at("config_hash") == config_hash(example_config("limits", true)));
  CHECK(m.at("files").size() == r.files.size());
  for (const auto& t : r.tables) CHECK(fs::path(t).extension() == ".csv");
}

TEST_CASE("runs are deterministic across worker counts") {
  json cfg = example_config("entangling-power", true);
  fs::path a = scratch("ep1"), b = scratch("ep3");
  RunOptions oa, ob;
  oa.out_dir = a.string();
  oa.workers = 1;
  ob.out_dir = b.string();
  ob.workers = 3;
  auto ra = run_experiment(cfg, oa);
  run_experiment(cfg, ob);
  for (const auto& t : ra.tables) CHECK(slurp(a / t) == slurp(b / t));
}

TEST_CASE("failed runs write nothing") {
  fs::path csv = scratch("flat.csv");
  {
    std::ofstream f(csv);
    f << "T_k,Q0\n";
    for (int i = 1; i <= 10; ++i) f << 0.05 * i << ",1e9\n";
  }
  json cfg = example_config("tls-fit", true);
  cfg["tls_fit"].erase("synthetic");
  cfg["tls_fit"]["data_csv"] = csv.string();
  fs::path out = scratch("flat_out");
  RunOptions o;
  o.out_dir = out.string();
  CHECK_THROWS_AS(run_experiment(cfg, o), NumericalError);
  CHECK_FALSE(fs::exists(out));
}

#ifdef CAVSIM_SIM_EXE
namespace {

int sim(const std::string& args) {
  std::string cmd = std::string(CAVSIM_SIM_EXE) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const std::string& name, const json& cfg) {
  fs::path p = scratch(name);
  std::ofstream(p) << cfg.dump(2);
  return p;
}

}  // namespace

TEST_CASE("CLI exit codes") {
  CHECK(sim("list-experiments") == 0);
  CHECK(sim("list-experiments --json") == 0);
  json good = example_config("limits", true);
  CHECK(sim("validate " + write_config("good.json", good).string()) == 0);
  fs::path out = scratch("cli_out");
  CHECK(sim("run " + write_config("good.json", good).string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "manifest.json"));

  json no_seed = good;
  no_seed.erase("seed");
  fs::path out2 = scratch("cli_out2");
  CHECK(sim("run " + write_config("noseed.json", no_seed).string() + " --out " + out2.string()) == 2);
  CHECK_FALSE(fs::exists(out2));
  CHECK(sim("validate " + write_config("noseed.json", no_seed).string()) == 2);
  {
    std::ofstream(scratch("syntax.json")) << "{ \"seed\": ";
  }
  CHECK(sim("validate " + (fs::temp_directory_path() / "cavsim_unit" / "syntax.json").string()) == 2);
  CHECK(sim("frobnicate") == 2);

  fs::path csv = scratch("flat_cli.csv");
  {
    std::ofstream f(csv);
    f << "T_k,Q0\n";
    for (int i = 1; i <= 10; ++i) f << 0.05 * i << ",1e9\n";
  }
  json flat = example_config("tls-fit", true);
  flat["tls_fit"].erase("synthetic");
  flat["tls_fit"]["data_csv"] = csv.string();
  fs::path out3 = scratch("cli_out3");
  CHECK(sim("run " + write_config("flat.json", flat).string() + " --out " + out3.string()) == 3);
  CHECK_FALSE(fs::exists(out3));
}
#endif
