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


// Acceptance report: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "mfas/data.hpp"
#include "mfas/experiment.hpp"
#include "mfas/lookahead.hpp"
#include "mfas/policy.hpp"
#include "mfas/pruning.hpp"
#include "mfas/schedule.hpp"
#include "mfas/simulate.hpp"
#include "mfas/stats.hpp"
#include "mfas/trace.hpp"
#include "oracles.hpp"

namespace {

using namespace mfas;
using testing::Instance;
using testing::InstanceSpec;
using testing::random_instance;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Lowest id among the values within `tol` of the maximum.
PointId argmax_tol(const std::vector<std::pair<PointId, double>>& values, double tol = 1e-12) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [x, v] : values) best = std::max(best, v);
  PointId pick = std::numeric_limits<PointId>::max();
  for (const auto& [x, v] : values) {
    if (v >= best - tol) pick = std::min(pick, x);
  }
  return pick;
}

std::vector<std::pair<PointId, double>> scores_of(const ScoreContext& ctx,
                                                  double (*score)(const ScoreContext&, PointId)) {
  std::vector<std::pair<PointId, double>> out;
  for (PointId x : query_candidates(ctx)) out.emplace_back(x, score(ctx, x));
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

Outcome base_case() {
  std::mt19937_64 rng(101);
  int agree = 0;
  constexpr int kInstances = 200;
  for (int trial = 0; trial < kInstances; ++trial) {
    const std::size_t n = 4 + trial % 5;
    InstanceSpec spec{.n = n, .k_nn = 3, .t = 3, .k = 1, .completed = 4, .density = 0.3,
                      .w_lo = 0.5, .w_hi = 1.5};
    spec.q = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    Instance inst = random_instance(spec, rng);
    const ExactResult exact = exact_expected_utility(inst.ctx, inst.schedule);
    const PointId a = argmax_tol(scores_of(inst.ctx, hens_score));
    const PointId b = argmax_tol(scores_of(inst.ctx, mfens_score));
    const PointId c = argmax_tol(exact.candidates);
    agree += (a == b && b == c);
  }
  return {agree == kInstances, std::to_string(agree) + "/" + std::to_string(kInstances) +
                                   " instances agree"};
}

Outcome expectimax_oracle() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  double ratio_sum = 0.0;
  constexpr int kInstances = 50;
  for (int trial = 0; trial < kInstances; ++trial) {
    const std::size_t n = 4 + trial % 3;
    InstanceSpec spec{.n = n, .k_nn = 2, .t = 2, .k = 1, .density = 0.15};
    spec.q = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    Instance inst = random_instance(spec, rng);
    const ExactResult exact = exact_expected_utility(inst.ctx, inst.schedule);
    const auto ref = testing::reference_expectimax(*inst.pool, 0.05, inst.state->q(), inst.obs,
                                                   inst.schedule, inst.completed,
                                                   inst.pending_point());
    if (ref.size() != exact.candidates.size()) return {false, "candidate sets differ"};
    double best = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (ref[i].first != exact.candidates[i].first) return {false, "candidate order differs"};
      worst = std::max(worst, std::abs(ref[i].second - exact.candidates[i].second));
      best = std::max(best, exact.candidates[i].second);
    }
    const Selection pick = select_query(PolicyKind{PolicyType::MfEns}, inst.ctx);
    for (const auto& [x, v] : exact.candidates) {
      if (x == pick.point) ratio_sum += v / best;
    }
  }
  const double ratio = ratio_sum / kInstances;
  return {worst < 1e-10 && ratio >= 0.9,
          "max |exact - reference| = " + fmt(worst) + ", MF-ENS mean fraction of optimum = " +
              fmt(ratio)};
}

Outcome reductions() {
  std::mt19937_64 rng(303);
  double worst_mf = 0.0;
  double worst_ens = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = random_instance({.n = 30, .k_nn = 4, .t = 5, .k = 2, .w_lo = 0.5, .w_hi = 1.5},
                                    rng);
    ScoreContext zero = inst.ctx;
    zero.kbar = 0;
    for (PointId x : query_candidates(inst.ctx)) {
      worst_mf = std::max(worst_mf, std::abs(mfens_score(zero, x) - hens_score(inst.ctx, x)));
    }
    Instance single = random_instance({.n = 30, .k_nn = 4, .t = 6, .k = 0, .w_lo = 0.5,
                                       .w_hi = 1.5, .h_only = true},
                                      rng);
    for (PointId x : query_candidates(single.ctx)) {
      worst_ens = std::max(worst_ens, std::abs(hens_score(single.ctx, x) - ens_score(single.ctx, x)));
    }
  }
  return {worst_mf <= 1e-12 && worst_ens <= 1e-12,
          "max |MF-ENS(kbar=0) - H-ENS| = " + fmt(worst_mf) + ", max |H-ENS(k=0) - ENS| = " +
              fmt(worst_ens)};
}

Outcome pruning_soundness() {
  std::mt19937_64 rng(404);
  int mismatches = 0;
  int violations = 0;
  int checked = 0;
  auto check = [&](const ScoreContext& ctx, int kbar) {
    const LookaheadScorer scorer(ctx, kbar);
    const auto bounds = scorer.bounds();
    const LazyResult full = exhaustive_argmax(scorer, bounds);
    std::mt19937_64 sub(7);
    const LazyResult lazy = lazy_argmax(ctx, scorer, bounds, sub);
    mismatches += !(lazy.point == full.point && lazy.f_star == full.f_star);
    for (const BoundEntry& b : bounds) violations += b.bound < scorer.score(b.point);
    ++checked;
  };
  for (int trial = 0; trial < 100; ++trial) {
    Instance single = random_instance({.n = 50, .k_nn = 5, .t = 8, .k = 0, .density = 0.15,
                                       .h_only = true},
                                      rng);
    check(single.ctx, 0);  // ENS
    Instance multi;
    do {
      multi = random_instance({.n = 50, .k_nn = 5, .t = 6, .k = 3, .density = 0.15}, rng);
    } while (multi.ctx.kbar == 0);
    check(multi.ctx, 0);               // H-ENS
    check(multi.ctx, multi.ctx.kbar);  // MF-ENS
  }
  return {mismatches == 0 && violations == 0,
          std::to_string(checked) + " searches, " + std::to_string(mismatches) +
              " lazy/exhaustive mismatches, " + std::to_string(violations) +
              " bound violations"};
}

Outcome model_equivalence() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  int affected_errors = 0;
  int permutations = 0;
  for (int pool_index = 0; pool_index < 20; ++pool_index) {
    const std::size_t n = 30;
    const PointPool pool = testing::random_pool(n, 5, rng, 0.3, 2.0);
    const double q = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    auto obs = testing::random_observations(n, 0.5, 0.35, rng);
    const testing::BruteModel brute(pool, 0.05, q, obs);
    for (int rep = 0; rep < 50; ++rep, ++permutations) {
      std::shuffle(obs.begin(), obs.end(), rng);
      ModelState s(pool, {0.05, q});
      for (const Observation& o : obs) {
        std::vector<double> before(2 * n);
        for (PointId x = 0; x < n; ++x) {
          before[2 * x] = s.predict(x, Fidelity::H);
          before[2 * x + 1] = s.predict(x, Fidelity::L);
        }
        const auto got = s.update(o);
        const std::set<CopyRef> affected(got.begin(), got.end());
        std::set<CopyRef> expected{{o.point, other(o.fidelity)}};
        for (const Neighbor& r : pool.rknn(o.point)) {
          expected.insert({r.id, Fidelity::H});
          expected.insert({r.id, Fidelity::L});
        }
        expected.erase({o.point, o.fidelity});
        for (const CopyRef& c : affected) affected_errors += !expected.count(c);
        for (const CopyRef& c : expected) {
          affected_errors += !s.is_labeled(c.point, c.fidelity) && !affected.count(c);
        }
        for (PointId x = 0; x < n; ++x) {
          for (const Fidelity f : {Fidelity::H, Fidelity::L}) {
            const double now = s.predict(x, f);
            const double was = before[2 * x + (f == Fidelity::L ? 1 : 0)];
            if (!affected.count({x, f}) && now != was) ++affected_errors;
          }
        }
      }
      const ModelState scratch = ModelState::from_observations(pool, {0.05, q}, obs);
      for (PointId x = 0; x < n; ++x) {
        for (const Fidelity f : {Fidelity::H, Fidelity::L}) {
          worst = std::max(worst, std::abs(s.predict(x, f) - scratch.predict(x, f)));
          worst = std::max(worst, std::abs(s.predict(x, f) - brute.predict(x, f)));
        }
      }
    }
  }
  return {worst <= 1e-12 && affected_errors == 0,
          std::to_string(permutations) + " permutations, max deviation " + fmt(worst) + ", " +
              std::to_string(affected_errors) + " affected-set errors"};
}

Outcome arithmetic() {
  const Schedule s = build_schedule(10, 2);
  bool ok = s.total() == 28;
  for (std::size_t i = 1; i <= s.total(); ++i) {
    ok = ok && ((s.fidelity_at(i) == Fidelity::H) == ((i - 1) % 3 == 0));
  }
  std::string detail = "T = " + std::to_string(s.total());
  const CsvTable table = synth_table({.n = 1000, .r = 0.05});
  std::size_t positives = 0;
  for (auto y : table.labels) positives += y;
  ok = ok && positives == 50;
  for (const double theta : {0.1, 0.3}) {
    std::mt19937_64 rng(606);
    const auto y_l = synthesize_low_fidelity(table.labels, theta, rng);
    std::size_t lost = 0, gained = 0, l_pos = 0;
    for (std::size_t i = 0; i < y_l.size(); ++i) {
      lost += table.labels[i] && !y_l[i];
      gained += !table.labels[i] && y_l[i];
      l_pos += y_l[i];
    }
    const std::size_t want = flip_count(positives, theta);
    const double rate = static_cast<double>(gained) / static_cast<double>(l_pos);
    ok = ok && lost == want && gained == want && std::abs(rate - theta) <= 0.5 / positives;
    detail += ", theta " + fmt(theta) + ": flips " + std::to_string(lost) + "/" +
              std::to_string(gained) + ", Pr(y_H=0|y_L=1) = " + fmt(rate);
  }
  return {ok, detail};
}

// Shared by the benchmark-scale criteria.
struct Benchmark {
  testing::TempDir dir{"acceptance"};
  ExperimentMatrix matrix;
  std::vector<RunTrace> traces;
  Summary summary;
  double seconds = 0.0;
};

void run_benchmark(Benchmark& b) {
  b.matrix = matrix_from_json(nlohmann::json::parse(R"({
    "datasets": [{"name": "synthetic", "synthetic": {"n": 2000, "r": 0.05}}],
    "policies": ["mf-ens", "ens", "mf-ucb", "ug"],
    "thetas": [0.1], "ks": [2], "t": 100, "seed_count": 20
  })"));
  b.matrix.output_dir = b.dir / "traces";
  const auto start = std::chrono::steady_clock::now();
  run_matrix(b.matrix);
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  b.traces = load_traces(b.matrix.output_dir);
  b.summary = summarize(b.traces);
}

std::map<std::uint64_t, double> utilities(const Benchmark& b, const std::string& policy) {
  std::map<std::uint64_t, double> out;
  for (const RunTrace& t : b.traces) {
    if (policy_name(t.config.policy.type) == policy) {
      out[t.config.seed] = static_cast<double>(t.utility);
    }
  }
  return out;
}

Outcome scaled_benchmark(const Benchmark& b) {
  const auto mf = utilities(b, "mf-ens");
  std::map<std::string, double> mean;
  for (const std::string p : {"mf-ens", "ens", "mf-ucb", "ug"}) {
    const auto u = utilities(b, p);
    if (u.size() != 20) return {false, p + " has " + std::to_string(u.size()) + " runs"};
    double sum = 0.0;
    for (const auto& [seed, v] : u) sum += v;
    mean[p] = sum / static_cast<double>(u.size());
  }
  const auto ens = utilities(b, "ens");
  std::vector<double> a, c;
  for (const auto& [seed, v] : mf) {
    a.push_back(v);
    c.push_back(ens.at(seed));
  }
  const TTestResult test = paired_t_test(a, c);
  const bool beats_ens = mean["mf-ens"] > mean["ens"] && test.p < 0.05;
  const bool beats_ucb = mean["mf-ens"] >= mean["mf-ucb"];
  const bool beats_ug = mean["mf-ens"] >= mean["ug"];
  return {beats_ens && beats_ucb && beats_ug,
          "mean targets MF-ENS " + fmt(mean["mf-ens"]) + ", ENS " + fmt(mean["ens"]) +
              " (p = " + fmt(test.p) + "), MF-UCB " + fmt(mean["mf-ucb"]) + ", UG " +
              fmt(mean["ug"]) + "; " + fmt(b.seconds) + " s"};
}

Outcome nonmyopia(const Benchmark& b) {
  const TrendRow* mf = nullptr;
  const TrendRow* ucb = nullptr;
  for (const TrendRow& t : b.summary.trends) {
    if (t.cell.policy == "mf-ens") mf = &t;
    if (t.cell.policy == "mf-ucb") ucb = &t;
  }
  if (!mf || !ucb) return {false, "missing trend rows"};
  const bool mf_rises = mf->last_decile > mf->first_decile && mf->test.p < 0.05;
  const bool ucb_not_rising = !(ucb->last_decile > ucb->first_decile && ucb->test.p < 0.05);
  return {mf_rises && ucb_not_rising,
          "MF-ENS first/last decile " + fmt(mf->first_decile) + " -> " + fmt(mf->last_decile) +
              " (p = " + fmt(mf->test.p) + "), MF-UCB " + fmt(ucb->first_decile) + " -> " +
              fmt(ucb->last_decile) + " (p = " + fmt(ucb->test.p) + ")"};
}

Outcome pruning_report(const Benchmark& b) {
  emit_series(b.summary, b.dir / "summary");
  const std::string csv = testing::read_text(b.dir / "summary" / "pruning.csv");
  const bool emitted = csv.find("coverage") != std::string::npos &&
                       csv.find("total") != std::string::npos &&
                       csv.find("partial") != std::string::npos;
  bool ok = emitted;
  std::string detail;
  for (const PruneRow& p : b.summary.pruning) {
    ok = ok && p.combined_pct_covered > 90.0;
    detail += p.cell.policy + ": coverage " + fmt(p.coverage_rate) + ", combined " +
              fmt(p.combined_pct_covered) + "%; ";
  }
  ok = ok && !b.summary.pruning.empty();
  return {ok, detail + (emitted ? "report emitted" : "report missing columns")};
}

Outcome determinism(const Benchmark& b) {
  const LabeledPool data = load_pool(b.matrix.datasets[0]);
  int mismatches = 0;
  int runs = 0;
  for (const TraceJob& job : plan_matrix(b.matrix)) {
    if (job.seed != 3) continue;
    const GroundTruth truth = cell_truth(data, b.matrix.datasets[0].name, job.theta, job.seed);
    RunConfig cfg = job_config(b.matrix, job);
    const std::string on_disk = testing::read_text(job.path);
    mismatches += serialize_trace(run_experiment(cfg, data.pool, truth)) != on_disk;
    ++runs;
    if (!cfg.policy.is_nonmyopic()) continue;
    cfg.wave_size = 8;
    cfg.workers = 1;
    const std::string one = serialize_trace(run_experiment(cfg, data.pool, truth));
    cfg.workers = 4;
    const std::string four = serialize_trace(run_experiment(cfg, data.pool, truth));
    mismatches += one != four;
    ++runs;
  }
  return {mismatches == 0 && runs > 0,
          std::to_string(runs) + " comparisons, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": "
              << o.detail << " [" << fmt(secs) << " s]" << std::endl;
  };

  report(1, "base-case optimality", base_case);
  report(2, "expectimax oracle", expectimax_oracle);
  report(3, "reduction identities", reductions);
  report(4, "pruning soundness", pruning_soundness);
  report(5, "model equivalence", model_equivalence);
  report(6, "schedule and simulation arithmetic", arithmetic);

  std::unique_ptr<Benchmark> bench;
  std::string bench_error;
  try {
    bench = std::make_unique<Benchmark>();
    run_benchmark(*bench);
  } catch (const std::exception& e) {
    bench.reset();
    bench_error = e.what();
  }
  auto with_bench = [&](Outcome (*f)(const Benchmark&)) {
    return [&, f]() -> Outcome {
      if (!bench) return {false, "benchmark did not run: " + bench_error};
      return f(*bench);
    };
  };
  report(7, "scaled benchmark", with_bench(scaled_benchmark));
  report(8, "nonmyopia signature", with_bench(nonmyopia));
  report(9, "pruning effectiveness", with_bench(pruning_report));
  report(10, "determinism", with_bench(determinism));

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
