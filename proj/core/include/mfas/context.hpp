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

#ifndef MFAS_CONTEXT_HPP_
#define MFAS_CONTEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfas/model.hpp"
#include "mfas/schedule.hpp"
#include "mfas/types.hpp"

namespace mfas {

enum class PolicyType { Greedy, Uncertainty, MfUcb, Ug, Ens, HEns, MfEns };

std::string_view policy_name(PolicyType type);
PolicyType parse_policy(std::string_view name);

struct PolicyKind {
  PolicyType type = PolicyType::MfEns;
  double beta_h = 0.001;
  double beta_l = 0.01;

  void validate() const;
  bool is_nonmyopic() const {
    return type == PolicyType::Ens || type == PolicyType::HEns ||
           type == PolicyType::MfEns;
  }
  // ENS ignores the L oracle and runs on a k = 0 schedule.
  bool single_fidelity() const { return type == PolicyType::Ens; }
};

constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

// u: fully-scored candidates before falling back to a random subset of at
// most s of the remaining unpruned candidates.
struct SearchCaps {
  std::size_t u = kUnlimited;
  std::size_t s = kUnlimited;
};

SearchCaps default_caps(PolicyType type);

// An issued H query whose label is not yet revealed. `l_issued` counts the L
// queries already made since it was issued.
struct PendingQuery {
  PointId point = 0;
  int l_issued = 0;
};

struct ScoreContext {
  ModelState* state = nullptr;
  std::size_t completed = 0;
  Fidelity fidelity = Fidelity::H;
  std::optional<PendingQuery> pending;
  std::optional<int> remaining_h;
  int kbar = 0;
  SearchCaps caps;
  std::uint64_t seed = 0;

  // Above this exploratory batch size the Y_L marginalization is sampled.
  int max_exact_exploration = 10;
  std::size_t mc_samples = 128;

  // Candidates scored per pruning wave; the f* used for pruning is refreshed
  // between waves only, so results depend on this value but not on
  // `workers`.
  std::size_t wave_size = 1;
  std::size_t workers = 1;

  ModelState& model() const;
  void validate() const;
  int lookahead_h() const;  // remaining_h, or throws when unset
};

// Context for iteration `completed + 1` of `schedule`: fidelity from the
// schedule, remaining H count by formula, exploration size by block position.
ScoreContext make_context(ModelState& state, const Schedule& schedule,
                          std::size_t completed, std::optional<PendingQuery> pending);

// Points that may be queried on the context's fidelity: unlabeled on that
// fidelity and, for H queries, not the pending point.
std::vector<PointId> query_candidates(const ScoreContext& ctx);

}  // namespace mfas

#endif  // MFAS_CONTEXT_HPP_
