// Copyright 2026 The Authors.
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


#include <doctest.h>

#ifdef MFAS_CLI_PATH

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using mfas::testing::TempDir;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MFAS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes and verbs") {
    TempDir dir("cli");
    const fs::path log = dir / "log.txt";

    CHECK(run_cli("", log) == 1);
    CHECK(run_cli("frobnicate", log) == 1);
    CHECK(run_cli("run " + (dir / "missing.json").string(), log) == 1);
    mfas::testing::write_text(dir / "bad.json", "{ not json");
    CHECK(run_cli("run " + (dir / "bad.json").string(), log) == 1);
    mfas::testing::write_text(dir / "empty.json", R"({"datasets": [], "policies": ["greedy"]})");
    CHECK(run_cli("run " + (dir / "empty.json").string(), log) == 1);

    CHECK(run_cli("synth --n 300 --clusters 10 --positive-clusters 2 --r 0.05 --seed 4 --out " +
                      (dir / "pool.csv").string(),
                  log) == 0);
    CHECK(fs::exists(dir / "pool.csv"));
    CHECK(run_cli("synth --r 2 --out " + (dir / "x.csv").string(), log) == 1);
    CHECK(run_cli("synth --out " + (dir / "no" / "such" / "dir" / "x.csv").string(), log) == 2);

    mfas::testing::write_text(dir / "cfg.json", R"({
      "datasets": [{"name": "pool", "csv": ")" + (dir / "pool.csv").string() + R"(", "k": 10}],
      "policies": ["greedy", "mf-ens"], "thetas": [0.1], "ks": [1], "t": 3, "seeds": [0, 1]
    })");
    const fs::path out = dir / "traces";
    CHECK(run_cli("run " + (dir / "cfg.json").string() + " --output-dir " + out.string(), log) == 0);
    CHECK(mfas::testing::read_text(log).find("ran=4") != std::string::npos);
    CHECK(run_cli("run " + (dir / "cfg.json").string() + " --output-dir " + out.string(), log) == 0);
    CHECK(mfas::testing::read_text(log).find("ran=0 skipped=4") != std::string::npos);

    CHECK(run_cli("summarize " + out.string() + " --out " + (dir / "summary").string(), log) == 0);
    CHECK(fs::exists(dir / "summary" / "summary.json"));
    CHECK(fs::exists(dir / "summary" / "pruning.csv"));
    CHECK(mfas::testing::read_text(log).find("coverage=") != std::string::npos);
    CHECK(run_cli("summarize " + (dir / "nowhere").string(), log) == 2);

    CHECK(run_cli("test " + out.string() + " --a mf-ens --b greedy", log) == 0);
    CHECK(mfas::testing::read_text(log).find("pairs=2") != std::string::npos);
    CHECK(run_cli("test " + out.string() + " --a mf-ens", log) == 1);

    mfas::testing::write_text(dir / "nofile.json", R"({
      "datasets": [{"name": "gone", "csv": "/nonexistent/gone.csv"}],
      "policies": ["greedy"], "thetas": [0.1], "ks": [1], "t": 3, "seeds": [0]
    })");
    CHECK(run_cli("run " + (dir / "nofile.json").string() + " --output-dir " + out.string(), log) == 2);
  }
}

#endif  // MFAS_CLI_PATH
