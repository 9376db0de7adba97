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

#include "mfas/pruning.hpp"

#include <algorithm>
#include <thread>

#include "mfas/lookahead.hpp"

namespace mfas {

PruneCounters& PruneCounters::operator+=(const PruneCounters& o) {
  candidates += o.candidates;
  total_pruned += o.total_pruned;
  partial_pruned += o.partial_pruned;
  fully_scored += o.fully_scored;
  skipped_by_cap += o.skipped_by_cap;
  covered = covered && o.covered;
  return *this;
}

double optimistic_posterior(const ModelState& state, PointId x, int j, Fidelity f) {
  state.pool().check_point(x);
  if (j < 0) throw InvalidArgument("optimistic count must be nonnegative");
  const double w = j * state.pool().max_incoming_weight(x);
  return (state.gamma() + state.pos_weight(x, f) + w) / (1.0 + state.tot_weight(x, f) + w);
}

BoundEntry score_bounds(const ScoreContext& ctx, PointId x) {
  return LookaheadScorer(ctx, ctx.kbar).bound(x);
}

namespace {

class WaveRunner {
 public:
  WaveRunner(const ScoreContext& ctx, const PrunableScorer& scorer)
      : scorer_(scorer), workers_(std::max<std::size_t>(ctx.workers, 1)) {}

  // Scores `wave` against a fixed incumbent snapshot.
  std::vector<std::optional<double>> run(std::span<const BoundEntry> wave,
                                         const Incumbent& snapshot) {
    std::vector<std::optional<double>> out(wave.size());
    const std::size_t used = std::min(workers_, wave.size());
    while (pool_.size() < used) pool_.push_back(scorer_.make_worker());
    const Incumbent* inc = snapshot.empty() ? nullptr : &snapshot;
    if (used <= 1) {
      for (std::size_t i = 0; i < wave.size(); ++i) {
        out[i] = scorer_.evaluate(*pool_[0], wave[i], inc);
      }
      return out;
    }
    std::vector<std::jthread> threads;
    threads.reserve(used);
    for (std::size_t w = 0; w < used; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < wave.size(); i += used) {
          out[i] = scorer_.evaluate(*pool_[w], wave[i], inc);
        }
      });
    }
    return out;
  }

 private:
  const PrunableScorer& scorer_;
  std::size_t workers_;
  std::vector<std::unique_ptr<PrunableScorer::Worker>> pool_;
};

// Processes `entries` in order: total pruning against the live incumbent,
// then waves of scoring. Stops after `limit` fully-scored candidates and
// returns the number of entries consumed.
std::size_t process(std::span<const BoundEntry> entries, std::size_t limit,
                    std::size_t wave_size, WaveRunner& runner, Incumbent& inc,
                    PruneCounters& counters) {
  std::size_t idx = 0;
  std::size_t scored = 0;
  std::vector<BoundEntry> wave;
  while (idx < entries.size() && scored < limit) {
    wave.clear();
    const std::size_t room = std::min(wave_size, limit - scored);
    while (idx < entries.size() && wave.size() < room) {
      const BoundEntry& e = entries[idx++];
      if (!inc.empty() && inc.dominates(e.bound, e.point)) {
        ++counters.total_pruned;
      } else {
        wave.push_back(e);
      }
    }
    if (wave.empty()) continue;
    const Incumbent snapshot = inc;
    const auto results = runner.run(wave, snapshot);
    for (std::size_t i = 0; i < wave.size(); ++i) {
      if (!results[i]) {
        ++counters.partial_pruned;
        continue;
      }
      ++counters.fully_scored;
      ++scored;
      inc.offer(*results[i], wave[i].point);
    }
  }
  return idx;
}

bool bound_order(const BoundEntry& a, const BoundEntry& b) {
  return a.bound > b.bound || (a.bound == b.bound && a.point < b.point);
}

}  // namespace

LazyResult lazy_argmax(const ScoreContext& ctx, const PrunableScorer& scorer,
                       std::vector<BoundEntry> bounds, std::mt19937_64& rng) {
  if (bounds.empty()) throw InvalidArgument("no candidates to select from");
  if (ctx.wave_size == 0) throw InvalidArgument("wave size must be positive");
  std::sort(bounds.begin(), bounds.end(), bound_order);

  LazyResult result;
  PruneCounters& c = result.counters;
  c.candidates = bounds.size();
  Incumbent inc;
  WaveRunner runner(ctx, scorer);

  const std::span<const BoundEntry> all(bounds);
  const std::size_t consumed = process(all, ctx.caps.u, ctx.wave_size, runner, inc, c);

  if (consumed < all.size()) {
    std::vector<BoundEntry> open;
    for (const BoundEntry& e : all.subspan(consumed)) {
      if (!inc.empty() && inc.dominates(e.bound, e.point)) {
        ++c.total_pruned;
      } else {
        open.push_back(e);
      }
    }
    if (open.size() > ctx.caps.s) {
      // Partial Fisher-Yates draw of the subset, then back to bound order.
      for (std::size_t i = 0; i < ctx.caps.s; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, open.size() - 1);
        std::swap(open[i], open[pick(rng)]);
      }
      c.skipped_by_cap += open.size() - ctx.caps.s;
      c.covered = false;
      open.resize(ctx.caps.s);
      std::sort(open.begin(), open.end(), bound_order);
    }
    process(open, kUnlimited, ctx.wave_size, runner, inc, c);
  }
  result.point = inc.point;
  result.f_star = inc.f_star;
  return result;
}

LazyResult exhaustive_argmax(const PrunableScorer& scorer, std::span<const BoundEntry> bounds) {
  if (bounds.empty()) throw InvalidArgument("no candidates to select from");
  auto worker = scorer.make_worker();
  Incumbent inc;
  for (const BoundEntry& e : bounds) inc.offer(*scorer.evaluate(*worker, e, nullptr), e.point);
  LazyResult result;
  result.point = inc.point;
  result.f_star = inc.f_star;
  result.counters.candidates = bounds.size();
  result.counters.fully_scored = bounds.size();
  return result;
}

}  // namespace mfas
