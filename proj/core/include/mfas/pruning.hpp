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

// Branch-and-bound selection over candidate scores.
//
// A candidate's score marginalizes the label y of the queried point:
//   f(x) = pi * f(x | y = 1) + (1 - pi) * f(x | y = 0),
// with f(x | 1) <= u_bar and f(x | 0) <= u_lower. A candidate is skipped
// outright when pi * u_bar + (1 - pi) * u_lower cannot beat the incumbent,
// and its marginalization is aborted once the branches computed so far plus
// upper bounds for the rest cannot beat it.

#ifndef MFAS_PRUNING_HPP_
#define MFAS_PRUNING_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/model.hpp"

namespace mfas {

struct BoundEntry {
  PointId point = 0;
  double bound = 0.0;
  double u_bar = 0.0;
  double u_lower = 0.0;
  double pi = 0.0;
};

// Best score seen so far. Ties go to the lower point id.
struct Incumbent {
  double f_star = -std::numeric_limits<double>::infinity();
  PointId point = std::numeric_limits<PointId>::max();

  bool empty() const { return point == std::numeric_limits<PointId>::max(); }

  // True when a candidate whose score is at most `upper` cannot replace the
  // incumbent.
  bool dominates(double upper, PointId x) const {
    return upper < f_star || (upper == f_star && x > point);
  }
  bool offer(double score, PointId x) {
    if (empty() || score > f_star || (score == f_star && x < point)) {
      f_star = score;
      point = x;
      return true;
    }
    return false;
  }
};

struct PruneCounters {
  std::size_t candidates = 0;
  std::size_t total_pruned = 0;
  std::size_t partial_pruned = 0;
  std::size_t fully_scored = 0;
  std::size_t skipped_by_cap = 0;
  bool covered = true;

  PruneCounters& operator+=(const PruneCounters& o);
  friend bool operator==(const PruneCounters&, const PruneCounters&) = default;
};

// Score function with optional early abort. Workers carry private scratch
// state so several candidates can be evaluated concurrently.
class PrunableScorer {
 public:
  class Worker {
   public:
    virtual ~Worker() = default;
  };

  virtual ~PrunableScorer() = default;
  virtual std::unique_ptr<Worker> make_worker() const = 0;

  // Full score when `incumbent` is null; otherwise returns nullopt as soon as
  // the partially computed score cannot beat it.
  virtual std::optional<double> evaluate(Worker& worker, const BoundEntry& bound,
                                         const Incumbent* incumbent) const = 0;
};

// Posterior x would have on fidelity f after j more positive observations,
// each at the largest weight a single observation can contribute to x.
double optimistic_posterior(const ModelState& state, PointId x, int j,
                            Fidelity f = Fidelity::H);

// Bound for a nonmyopic lookahead score (H-ENS when ctx.kbar == 0, MF-ENS
// otherwise) at candidate x.
BoundEntry score_bounds(const ScoreContext& ctx, PointId x);

struct LazyResult {
  PointId point = 0;
  double f_star = 0.0;
  PruneCounters counters;
};

// Visits candidates in descending bound order (ties by id), total-pruning
// those whose bound cannot beat f*, partially pruning inside the scorer, and
// applying the u/s caps from ctx.caps. The s-subset is drawn from `rng`
// before any scoring of the subset starts.
LazyResult lazy_argmax(const ScoreContext& ctx, const PrunableScorer& scorer,
                       std::vector<BoundEntry> bounds, std::mt19937_64& rng);

// Scores every candidate; ties go to the lower id.
LazyResult exhaustive_argmax(const PrunableScorer& scorer,
                             std::span<const BoundEntry> bounds);

}  // namespace mfas

#endif  // MFAS_PRUNING_HPP_
