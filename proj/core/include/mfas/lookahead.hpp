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

// Rollout scores for the nonmyopic multifidelity policies.
//
// For each label branch of the putative query (and, for L queries, of the
// pending H query) the branch is committed to the model, the greedy H batch
// of size l_H is rebuilt, and with an exploratory batch size kbar > 0 the
// kbar points with the highest exploration value v are chosen as X_L. Their
// labels Y_L are marginalized assuming each one only moves the H posterior of
// its own point. With kbar = 0 this is the one-stage (H-ENS) score.
//
// Per-iteration precomputation keeps each branch at O(n + m log m): the
// sorted posterior list of the unbranched state is merged with the few
// copies a single observation touches.

#ifndef MFAS_LOOKAHEAD_HPP_
#define MFAS_LOOKAHEAD_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/pruning.hpp"

namespace mfas {

// One label branch of a candidate's score.
struct BranchDetail {
  double probability = 0.0;
  bool query_label = false;
  std::optional<bool> pending_label;
  double value = 0.0;                   // immediate reward + expected batch value
  std::vector<PointId> exploration;     // X_L, in selection order
  std::vector<double> exploration_values;
  double exploration_mass = 0.0;        // sum of Pr(Y_L) over enumerated outcomes
};

class LookaheadScorer final : public PrunableScorer {
 public:
  // The context's state must outlive the scorer and must not be modified
  // while the scorer is in use.
  LookaheadScorer(const ScoreContext& ctx, int kbar);

  const ScoreContext& context() const { return ctx_; }
  std::span<const PointId> candidates() const { return candidates_; }
  int exploration_size() const { return kbar_; }
  int batch_size() const { return ell_; }

  BoundEntry bound(PointId x) const;
  std::vector<BoundEntry> bounds() const;

  std::unique_ptr<Worker> make_worker() const override;
  std::optional<double> evaluate(Worker& worker, const BoundEntry& bound,
                                 const Incumbent* incumbent) const override;

  // Full score of x, computed on a private copy of the state.
  double score(PointId x) const;

  std::vector<BranchDetail> explain(PointId x) const;

 private:
  struct Base;
  struct Scratch;
  class LookaheadWorker;
  // Upper bound a * max(c1 - p, 0) + b * max(c0 - p, 0) on the exploration
  // value of one point at swap threshold p.
  struct ExploreBound {
    double v_floor;  // value at p_star_floor_
    double a;
    double b;
    double c1;
    double c0;
    PointId id;
    double at(double p) const;
  };
  struct Branch {
    double probability;
    bool query_label;
    std::optional<bool> pending_label;
  };

  std::vector<Branch> branches(const ModelState& state, PointId x) const;
  double branch_value(ModelState& state, Scratch& scratch, PointId x,
                      const Branch& branch, std::size_t branch_index,
                      BranchDetail* detail) const;
  double expected_batch_value(const ModelState& state, Scratch& scratch,
                              const Base& base, std::span<const PointId> changed,
                              std::uint64_t mc_seed, BranchDetail* detail) const;
  std::optional<double> run(ModelState& state, Scratch& scratch, PointId x,
                            double u_bar, double u_lower, const Incumbent* incumbent,
                            std::vector<BranchDetail>* details) const;
  Base build_base(const ModelState& state) const;
  double exploration_bound(PointId x, double p_lo, Scratch& scratch) const;
  BoundEntry bound_with(PointId x, Scratch& scratch) const;
  bool batch_eligible(const ModelState& state, PointId z) const;

  ScoreContext ctx_;
  int kbar_;
  int ell_;
  std::optional<PointId> pending_;
  std::vector<PointId> candidates_;

  // Unbranched state; for L queries also the two pending-label branches.
  std::shared_ptr<const Base> now_;
  std::shared_ptr<const Base> pending_base_[2];
  double pending_pi_ = 0.0;

  // Bound precomputation.
  double p_star_floor_ = 0.0;
  std::vector<ExploreBound> vub_sorted_;  // by v_floor, descending
  std::vector<std::uint8_t> pending_touch_;          // z in rknn(pending)
  std::vector<std::pair<double, PointId>> pending_upgrades_;  // sorted desc
  double pending_only_top_ = 0.0;                    // T0 for L queries
};

}  // namespace mfas

#endif  // MFAS_LOOKAHEAD_HPP_
