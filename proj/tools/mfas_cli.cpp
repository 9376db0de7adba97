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

// Command-line front end: run, summarize, test, synth.
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfas/data.hpp"
#include "mfas/experiment.hpp"
#include "mfas/stats.hpp"
#include "mfas/trace.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunArgs {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> jobs;
  std::optional<int> t;
  std::vector<std::uint64_t> seeds;
};

struct SummarizeArgs {
  std::vector<std::string> inputs;
  std::string out = "summary";
};

struct TestArgs {
  std::string input;
  std::string a;
  std::string b;
  std::optional<std::string> dataset;
  std::optional<double> theta;
  std::optional<int> k;
};

struct SynthArgs {
  mfas::SyntheticParams params;
  std::string out = "pool.csv";
};

int run_verb(const RunArgs& args) {
  nlohmann::json doc;
  try {
    std::ifstream in(args.config);
    if (!in) throw mfas::InvalidArgument("cannot open config " + args.config);
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw mfas::InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (args.output_dir) doc["output_dir"] = *args.output_dir;
  if (args.jobs) doc["jobs"] = *args.jobs;
  if (args.t) doc["t"] = *args.t;
  if (!args.seeds.empty()) doc["seeds"] = args.seeds;
  const mfas::ExperimentMatrix matrix = mfas::matrix_from_json(doc);
  const mfas::MatrixReport report = mfas::run_matrix(matrix, &std::cerr);
  std::cout << "planned=" << report.planned << " ran=" << report.ran
            << " skipped=" << report.skipped << " rerun_partial=" << report.rerun_partial << '\n';
  return kOk;
}

int summarize_verb(const SummarizeArgs& args) {
  std::vector<mfas::RunTrace> traces;
  std::vector<std::filesystem::path> partial;
  for (const auto& input : args.inputs) {
    auto loaded = mfas::load_traces(input, &partial);
    for (auto& t : loaded) traces.push_back(std::move(t));
  }
  for (const auto& p : partial) std::cerr << "skipping partial trace " << p.string() << '\n';
  const mfas::Summary summary = mfas::summarize(traces);
  mfas::emit_series(summary, args.out);
  for (const auto& row : summary.rows) {
    std::cout << row.cell.label() << " mean=" << row.mean << " se=" << row.se
              << " n=" << row.repeats << '\n';
  }
  for (const auto& p : summary.pruning) {
    std::cout << p.cell.label() << " coverage=" << p.coverage_rate << " total%=" << p.total_pct
              << " partial%=" << p.partial_pct << " combined%(covered)=" << p.combined_pct_covered
              << '\n';
  }
  return kOk;
}

int test_verb(const TestArgs& args) {
  const auto traces = mfas::load_traces(args.input);
  std::map<std::uint64_t, double> a;
  std::map<std::uint64_t, double> b;
  std::map<std::string, std::size_t> cells;
  for (const auto& t : traces) {
    const auto cell = mfas::cell_of(t.config);
    if (args.dataset && cell.dataset != *args.dataset) continue;
    if (args.theta && cell.theta != *args.theta) continue;
    if (args.k && cell.k != *args.k) continue;
    auto* target = cell.policy == args.a ? &a : cell.policy == args.b ? &b : nullptr;
    if (!target) continue;
    if (target->count(t.config.seed)) {
      throw mfas::InvalidArgument("several cells match policy " + cell.policy +
                                  "; narrow with --dataset/--theta/--k");
    }
    (*target)[t.config.seed] = static_cast<double>(t.utility);
  }
  std::vector<double> xa;
  std::vector<double> xb;
  for (const auto& [seed, u] : a) {
    const auto it = b.find(seed);
    if (it == b.end()) continue;
    xa.push_back(u);
    xb.push_back(it->second);
  }
  const mfas::TTestResult r = mfas::paired_t_test(xa, xb);
  std::cout << "pairs=" << xa.size() << " mean_diff=" << r.mean_diff << " t=" << r.t
            << " df=" << r.df << " p=";
  if (r.p < mfas::kPValueFloor) {
    std::cout << "<" << mfas::kPValueFloor;
  } else {
    std::cout << r.p;
  }
  std::cout << '\n';
  return kOk;
}

int synth_verb(const SynthArgs& args) {
  const mfas::CsvTable table = mfas::synth_table(args.params);
  mfas::write_csv(args.out, table.features, table.labels);
  std::size_t positives = 0;
  for (auto y : table.labels) positives += y;
  std::cout << "wrote " << args.out << " n=" << table.labels.size() << " positives=" << positives
            << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonmyopic multifidelity active search experiments"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment matrix from a JSON config");
  run_cmd->add_option("config", run.config, "Matrix config file")->required();
  run_cmd->add_option("--output-dir", run.output_dir, "Override output directory");
  run_cmd->add_option("--jobs", run.jobs, "Parallel experiments");
  run_cmd->add_option("--t", run.t, "Override the H budget");
  run_cmd->add_option("--seeds", run.seeds, "Override the seed list")->delimiter(',');

  SummarizeArgs summarize;
  auto* sum_cmd = app.add_subcommand("summarize", "Aggregate traces into tables and series");
  sum_cmd->add_option("inputs", summarize.inputs, "Trace files or directories")->required();
  sum_cmd->add_option("--out", summarize.out, "Output directory");

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Paired t-test of final utility between policies");
  test_cmd->add_option("input", test.input, "Trace file or directory")->required();
  test_cmd->add_option("--a", test.a, "First policy")->required();
  test_cmd->add_option("--b", test.b, "Second policy")->required();
  test_cmd->add_option("--dataset", test.dataset, "Dataset filter");
  test_cmd->add_option("--theta", test.theta, "Theta filter");
  test_cmd->add_option("--k", test.k, "k filter");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic Gaussian-cluster pool CSV");
  synth_cmd->add_option("--n", synth.params.n, "Points");
  synth_cmd->add_option("--dims", synth.params.dims, "Feature dimensions");
  synth_cmd->add_option("--clusters", synth.params.clusters, "Clusters");
  synth_cmd->add_option("--positive-clusters", synth.params.positive_clusters,
                        "Clusters holding the positives");
  synth_cmd->add_option("--r", synth.params.r, "Prevalence");
  synth_cmd->add_option("--spread", synth.params.spread, "Within-cluster standard deviation");
  synth_cmd->add_option("--seed", synth.params.seed, "Seed");
  synth_cmd->add_option("--out", synth.out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run_verb(run);
    if (*sum_cmd) return summarize_verb(summarize);
    if (*test_cmd) return test_verb(test);
    if (*synth_cmd) return synth_verb(synth);
  } catch (const mfas::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
