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


// Microbenchmarks for the hot paths: model updates, lookahead scoring, the
// pruned argmax and neighbor-graph construction.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <random>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/data.hpp"
#include "mfas/lookahead.hpp"
#include "mfas/model.hpp"
#include "mfas/policy.hpp"
#include "mfas/pruning.hpp"
#include "mfas/schedule.hpp"

namespace {

using namespace mfas;

const LabeledPool& shared_pool() {
  static const LabeledPool data = synth_pool(SyntheticParams{}, 50);
  return data;
}

// A mid-run state: `labels` random H and L observations drawn from the truth.
ModelState mid_run_state(const LabeledPool& data, std::size_t labels, std::uint64_t seed) {
  ModelState state(data.pool);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<PointId> pick(0, static_cast<PointId>(data.pool.size() - 1));
  while (state.observations().size() < labels) {
    const PointId x = pick(rng);
    const Fidelity f = rng() % 3 == 0 ? Fidelity::H : Fidelity::L;
    if (state.is_labeled(x, f)) continue;
    state.update({x, f, data.y_h[x] != 0});
  }
  return state;
}

void BM_ModelUpdateRestore(benchmark::State& st) {
  const LabeledPool& data = shared_pool();
  ModelState state = mid_run_state(data, 100, 1);
  std::vector<PointId> free;
  for (PointId x = 0; x < data.pool.size(); ++x) {
    if (!state.is_labeled(x, Fidelity::H)) free.push_back(x);
  }
  std::size_t i = 0;
  for (auto _ : st) {
    const auto token = state.snapshot();
    benchmark::DoNotOptimize(state.update({free[i++ % free.size()], Fidelity::H, true}));
    state.restore(token);
  }
}
BENCHMARK(BM_ModelUpdateRestore);

void BM_LookaheadScore(benchmark::State& st) {
  const LabeledPool& data = shared_pool();
  ModelState state = mid_run_state(data, 100, 2);
  const Schedule schedule = build_schedule(100, 2);
  const ScoreContext ctx = make_context(state, schedule, 99, std::nullopt);
  const LookaheadScorer scorer(ctx, static_cast<int>(st.range(0)));
  const auto candidates = scorer.candidates();
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(scorer.score(candidates[i++ % candidates.size()]));
  }
}
BENCHMARK(BM_LookaheadScore)->Arg(0)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_LazyArgmax(benchmark::State& st) {
  const LabeledPool& data = shared_pool();
  ModelState state = mid_run_state(data, 100, 3);
  const Schedule schedule = build_schedule(100, 2);
  ScoreContext ctx = make_context(state, schedule, 99, std::nullopt);
  ctx.caps = default_caps(PolicyType::MfEns);
  for (auto _ : st) {
    const LookaheadScorer scorer(ctx, ctx.kbar);
    std::mt19937_64 rng(4);
    benchmark::DoNotOptimize(lazy_argmax(ctx, scorer, scorer.bounds(), rng));
  }
}
BENCHMARK(BM_LazyArgmax)->Unit(benchmark::kMillisecond);

void BM_NeighborGraph(benchmark::State& st) {
  SyntheticParams params;
  params.n = static_cast<std::size_t>(st.range(0));
  const CsvTable table = synth_table(params);
  for (auto _ : st) {
    benchmark::DoNotOptimize(build_neighbor_graph(table.features, 50, Metric::Euclidean));
  }
}
BENCHMARK(BM_NeighborGraph)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
