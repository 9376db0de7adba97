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

// Query-selection policies and their score functions.

#ifndef MFAS_POLICY_HPP_
#define MFAS_POLICY_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/pruning.hpp"
#include "mfas/schedule.hpp"

namespace mfas {

// Pr(y_H = 1 | x, D).
double greedy_score(const ScoreContext& ctx, PointId x);

// -|Pr(y_L = 1 | x, D) - 0.5|.
double uncertainty_score(const ScoreContext& ctx, PointId x);

// pi + beta * sqrt(pi (1 - pi)) on the context's fidelity.
double ucb_score(const ScoreContext& ctx, PointId x, double beta);

// Sum of the `ell` largest entries.
double top_sum(std::span<const double> probs, int ell);

// One-stage lookahead score (greedy H batch of size l_H after the query).
double hens_score(const ScoreContext& ctx, PointId x);

// Two-stage lookahead score with an exploratory L batch of size ctx.kbar.
double mfens_score(const ScoreContext& ctx, PointId x);

// Single-fidelity ENS score computed directly from the model: immediate
// reward plus the expected top-l sum of H posteriors, with l = l_H. Only H
// observations are considered as putative outcomes.
double ens_score(const ScoreContext& ctx, PointId x);

// E_{y_L}[max(Pr(y_H = 1 | x, y_L, D) - p_star, 0)]; zero for H-labeled x.
double value_v(const ScoreContext& ctx, PointId x, double p_star);

struct ExplorationBatch {
  std::vector<PointId> points;
  std::vector<double> vscores;
};

// The ctx.kbar highest-v points that are unlabeled on both fidelities, not
// pending and not in `greedy_batch`; ties to the lower id.
ExplorationBatch build_L_batch(const ScoreContext& ctx, std::span<const PointId> greedy_batch,
                               double p_star);

struct ExactGuard {
  std::size_t max_points = 8;
  std::size_t max_remaining = 4;
};

struct ExactResult {
  PointId point = 0;
  double value = 0.0;
  // (candidate, expected utility) for every candidate of the first query.
  std::vector<std::pair<PointId, double>> candidates;
};

// Exhaustive expectimax over the rest of `schedule` starting at iteration
// ctx.completed + 1, using the model as the label distribution. A pending H
// label stays hidden until the next H iteration (or the end of the
// schedule). Utility counts H positives of queries issued from the current
// iteration on.
ExactResult exact_expected_utility(const ScoreContext& ctx, const Schedule& schedule,
                                   ExactGuard guard = {});

struct Selection {
  PointId point = 0;
  double score = 0.0;
  PruneCounters counters;
};

// Highest-scoring candidate on the context's fidelity; ties to the lower id.
Selection select_query(const PolicyKind& policy, const ScoreContext& ctx);

}  // namespace mfas

#endif  // MFAS_POLICY_HPP_
