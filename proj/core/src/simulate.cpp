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

#include "mfas/simulate.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mfas/policy.hpp"
#include "mfas/rng.hpp"
#include "mfas/schedule.hpp"

namespace mfas {

namespace {

// First `count` entries of `ids` become a uniform random subset.
void partial_shuffle(std::vector<PointId>& ids, std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
}

}  // namespace

std::size_t flip_count(std::size_t positives, double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(theta * static_cast<double>(positives) + 0.5));
}

std::vector<std::uint8_t> synthesize_low_fidelity(std::span<const std::uint8_t> y_h,
                                                  double theta, std::mt19937_64& rng) {
  std::vector<PointId> pos;
  std::vector<PointId> neg;
  for (std::size_t i = 0; i < y_h.size(); ++i) {
    (y_h[i] ? pos : neg).push_back(static_cast<PointId>(i));
  }
  const std::size_t flips = flip_count(pos.size(), theta);
  if (flips > neg.size()) throw InvalidArgument("not enough negatives to flip");
  std::vector<std::uint8_t> y_l(y_h.begin(), y_h.end());
  partial_shuffle(pos, flips, rng);
  partial_shuffle(neg, flips, rng);
  for (std::size_t i = 0; i < flips; ++i) {
    y_l[pos[i]] = 0;
    y_l[neg[i]] = 1;
  }
  return y_l;
}

GroundTruth make_ground_truth(std::vector<std::uint8_t> y_h, double theta,
                              std::mt19937_64& rng) {
  GroundTruth truth;
  truth.y_l = synthesize_low_fidelity(y_h, theta, rng);
  std::size_t positives = 0;
  for (auto y : y_h) positives += y ? 1 : 0;
  truth.r = y_h.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(y_h.size());
  truth.theta = theta;
  truth.y_h = std::move(y_h);
  return truth;
}

std::vector<Observation> init_observations(const GroundTruth& truth, std::mt19937_64& rng) {
  if (truth.y_h.size() != truth.y_l.size()) throw InvalidArgument("label vectors differ in size");
  std::vector<PointId> eligible;
  for (std::size_t i = 0; i < truth.y_h.size(); ++i) {
    if (truth.y_h[i] && truth.y_l[i]) eligible.push_back(static_cast<PointId>(i));
  }
  if (eligible.empty()) throw InvalidArgument("no point is positive on both fidelities");
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  const PointId x = eligible[pick(rng)];
  return {Observation{x, Fidelity::H, true}, Observation{x, Fidelity::L, true}};
}

SearchCaps RunConfig::effective_caps() const {
  return caps ? *caps : default_caps(policy.type);
}

bool operator==(const StepRecord& a, const StepRecord& b) {
  return a.iteration == b.iteration && a.fidelity == b.fidelity && a.point == b.point &&
         a.score == b.score && a.posterior == b.posterior && a.label == b.label &&
         a.utility == b.utility && a.q == b.q && a.counters == b.counters;
}

RunTrace run_experiment(const RunConfig& config, const PointPool& pool, const GroundTruth& truth) {
  config.policy.validate();
  if (truth.y_h.size() != pool.size() || truth.y_l.size() != pool.size()) {
    throw InvalidArgument("ground truth does not match the pool size");
  }
  if (config.q_grid.empty()) throw InvalidArgument("q grid must be nonempty");
  const Schedule schedule(config.t, config.effective_k());
  const std::size_t t = static_cast<std::size_t>(config.t);
  const std::size_t l_total = schedule.total() - t;
  if (pool.size() < t + 1 || pool.size() < l_total + 1) {
    throw InvalidArgument("budget exceeds the number of unlabeled points");
  }

  RunTrace trace;
  trace.config = config;
  std::mt19937_64 init_rng(derive_seed(config.seed, {tag("init")}));
  trace.initial = init_observations(truth, init_rng);

  ModelState state(pool, config.model);
  for (const Observation& o : trace.initial) state.update(o);

  std::optional<PendingQuery> pending;
  std::size_t utility = 0;
  const std::uint64_t select_seed = derive_seed(config.seed, {tag("select")});
  for (std::size_t i = 1; i <= schedule.total(); ++i) {
    const Fidelity f = schedule.fidelity_at(i);
    if (f == Fidelity::H && pending) {
      state.update(Observation{pending->point, Fidelity::H, truth.y_h[pending->point] != 0});
      pending.reset();
    }
    state.set_q(state.estimate_damping(config.q_grid));

    const auto start = std::chrono::steady_clock::now();
    ScoreContext ctx = make_context(state, schedule, i - 1, pending);
    ctx.caps = config.effective_caps();
    ctx.seed = select_seed;
    ctx.wave_size = config.wave_size;
    ctx.workers = config.workers;
    const Selection sel = select_query(config.policy, ctx);
    const auto stop = std::chrono::steady_clock::now();

    const PointId x = sel.point;
    if (state.is_labeled(x, f) || (f == Fidelity::H && pending && pending->point == x)) {
      throw StateError("policy selected an already queried point " + std::to_string(x));
    }
    StepRecord rec;
    rec.iteration = i;
    rec.fidelity = f;
    rec.point = x;
    rec.score = sel.score;
    rec.posterior = state.predict(x, f);
    rec.q = state.q();
    rec.counters = sel.counters;
    rec.seconds = std::chrono::duration<double>(stop - start).count();
    if (f == Fidelity::H) {
      rec.label = truth.y_h[x] != 0;
      utility += rec.label ? 1 : 0;
      pending = PendingQuery{x, 0};
    } else {
      rec.label = truth.y_l[x] != 0;
      state.update(Observation{x, Fidelity::L, rec.label});
      ++pending->l_issued;
    }
    rec.utility = utility;
    trace.steps.push_back(rec);
  }
  trace.utility = utility;
  return trace;
}

}  // namespace mfas
