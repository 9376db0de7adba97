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

// Experiment matrices, aggregation and result emission.

#ifndef MFAS_EXPERIMENT_HPP_
#define MFAS_EXPERIMENT_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfas/data.hpp"
#include "mfas/simulate.hpp"
#include "mfas/stats.hpp"

namespace mfas {

struct ExperimentMatrix {
  std::vector<DatasetSpec> datasets;
  std::vector<PolicyKind> policies;
  std::vector<double> thetas{0.1, 0.3};
  std::vector<int> ks{2, 5};
  int t = 100;
  std::vector<std::uint64_t> seeds;
  std::optional<SearchCaps> caps;  // per-policy defaults when unset
  ModelParams model;
  std::vector<double> q_grid = default_q_grid();
  std::filesystem::path output_dir = "results";
  std::size_t jobs = 1;
  std::size_t wave_size = 1;
  std::size_t workers = 1;

  void validate() const;
};

// Parses the declarative config document. Keys:
//   datasets: [{name, csv | synthetic{n, dims, clusters, positive_clusters,
//               r, spread, seed}, k, metric, weighting, label_column,
//               cache_dir}]
//   policies: ["mf-ens", {"name": "mf-ucb", "beta_h": .., "beta_l": ..}, ...]
//   thetas, ks, t, seeds (list) or seed_count, caps{u, s}, gamma, q_grid,
//   output_dir, jobs, wave_size, workers.
// Throws InvalidArgument on malformed or invalid documents.
ExperimentMatrix matrix_from_json(const nlohmann::json& doc);

struct TraceJob {
  std::size_t dataset = 0;  // index into matrix.datasets
  PolicyKind policy;
  double theta = 0.0;
  int k = 0;
  std::uint64_t seed = 0;
  std::filesystem::path path;
};

// Cartesian product of the matrix axes, in a fixed order.
std::vector<TraceJob> plan_matrix(const ExperimentMatrix& matrix);

// Ground truth shared by every policy of a (dataset, theta, seed) cell.
GroundTruth cell_truth(const LabeledPool& data, const std::string& dataset, double theta,
                       std::uint64_t seed);

RunConfig job_config(const ExperimentMatrix& matrix, const TraceJob& job);

struct MatrixReport {
  std::size_t planned = 0;
  std::size_t ran = 0;
  std::size_t skipped = 0;        // complete traces left untouched
  std::size_t rerun_partial = 0;  // partial traces found and rerun
  std::vector<std::filesystem::path> traces;
};

// Runs every job without a complete trace, `matrix.jobs` at a time.
MatrixReport run_matrix(const ExperimentMatrix& matrix, std::ostream* log = nullptr);

struct CellId {
  std::string dataset;
  std::string policy;
  double theta = 0.0;
  int k = 0;
  int t = 0;

  std::string label() const;
  friend auto operator<=>(const CellId&, const CellId&) = default;
  friend bool operator==(const CellId&, const CellId&) = default;
};

CellId cell_of(const RunConfig& config);

struct SummaryRow {
  CellId cell;
  double mean = 0.0;
  double se = 0.0;
  std::size_t repeats = 0;
};

struct Series {
  std::string name;
  std::vector<double> value;
  std::vector<double> se;
  std::vector<std::size_t> count;

  friend bool operator==(const Series&, const Series&) = default;
};

struct PruneRow {
  CellId cell;
  std::size_t selections = 0;     // lookahead selections
  double coverage_rate = 0.0;     // fraction resolved without the caps
  double total_pct = 0.0;         // of all candidates
  double partial_pct = 0.0;
  double combined_pct_covered = 0.0;  // total + partial, covered selections only
};

struct PairTest {
  CellId a;
  CellId b;
  std::size_t pairs = 0;
  TTestResult test;  // a - b on final utility
};

// Mean posterior at query over the first and last tenth of the H queries.
struct TrendRow {
  CellId cell;
  std::size_t seeds = 0;
  double first_decile = 0.0;
  double last_decile = 0.0;
  TTestResult test;  // last - first
};

struct Summary {
  std::vector<SummaryRow> rows;
  std::vector<Series> utility;     // cumulative utility per iteration
  std::vector<Series> posterior;   // posterior at query, per H query
  std::vector<Series> difference;  // paired cumulative-utility differences
  std::vector<PruneRow> pruning;
  std::vector<PairTest> tests;
  std::vector<TrendRow> trends;
};

// Traces are grouped by cell; repeats within a cell must share the config
// apart from the seed, and seeds must be distinct.
Summary summarize(const std::vector<RunTrace>& traces);

// Per-seed differences of cumulative utility (a - b), averaged over seeds
// present in both. Aligned by iteration when the schedules match, by H
// query index otherwise.
Series difference_series(const std::vector<const RunTrace*>& a,
                         const std::vector<const RunTrace*>& b, const std::string& name);

TrendRow decile_trend(const CellId& cell, const std::vector<const RunTrace*>& traces);

PruneRow prune_summary(const CellId& cell, const std::vector<const RunTrace*>& traces);

// Complete traces under `root` (a directory searched recursively for
// *.jsonl, or a single file). Partial traces are reported in `partial`.
std::vector<RunTrace> load_traces(const std::filesystem::path& root,
                                  std::vector<std::filesystem::path>* partial = nullptr);

nlohmann::json summary_to_json(const Summary& summary);

// Writes summary.json, summary.csv, pruning.csv, tests.csv, trends.csv and
// one CSV per series under series/{utility,posterior,difference}/. Series
// CSV columns: series,index,value,se,count (index is 1-based).
void emit_series(const Summary& summary, const std::filesystem::path& dir);

Series read_series_csv(const std::filesystem::path& path);

}  // namespace mfas

#endif  // MFAS_EXPERIMENT_HPP_
