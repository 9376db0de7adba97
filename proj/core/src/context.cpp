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

#include "mfas/context.hpp"

#include <array>
#include <string>
#include <utility>

namespace mfas {

namespace {

constexpr std::array<std::pair<PolicyType, std::string_view>, 7> kPolicyNames{{
    {PolicyType::Greedy, "greedy"},
    {PolicyType::Uncertainty, "uncertainty"},
    {PolicyType::MfUcb, "mf-ucb"},
    {PolicyType::Ug, "ug"},
    {PolicyType::Ens, "ens"},
    {PolicyType::HEns, "h-ens"},
    {PolicyType::MfEns, "mf-ens"},
}};

}  // namespace

std::string_view policy_name(PolicyType type) {
  for (const auto& [t, name] : kPolicyNames) {
    if (t == type) return name;
  }
  return "unknown";
}

PolicyType parse_policy(std::string_view name) {
  for (const auto& [t, n] : kPolicyNames) {
    if (n == name) return t;
  }
  throw InvalidArgument("unknown policy '" + std::string(name) + "'");
}

void PolicyKind::validate() const {
  if (!(beta_h >= 0.0) || !(beta_l >= 0.0)) {
    throw InvalidArgument("UCB beta values must be nonnegative");
  }
}

SearchCaps default_caps(PolicyType type) {
  switch (type) {
    case PolicyType::MfEns:
      return {500, 500};
    case PolicyType::HEns:
    case PolicyType::Ens:
      return {1000, 1000};
    default:
      return {};
  }
}

ModelState& ScoreContext::model() const {
  if (state == nullptr) throw InvalidArgument("score context has no model state");
  return *state;
}

void ScoreContext::validate() const {
  model();
  if (kbar < 0) throw InvalidArgument("exploration size must be nonnegative");
  if (pending.has_value() != (fidelity == Fidelity::L)) {
    throw InvalidArgument("a pending H query must be present exactly at L iterations");
  }
  if (remaining_h && *remaining_h < 0) {
    throw InvalidArgument("remaining H count must be nonnegative");
  }
  if (pending) state->pool().check_point(pending->point);
  if (wave_size == 0) throw InvalidArgument("wave size must be positive");
}

int ScoreContext::lookahead_h() const {
  if (!remaining_h) throw InvalidArgument("remaining H count is not set");
  return *remaining_h;
}

ScoreContext make_context(ModelState& state, const Schedule& schedule,
                          std::size_t completed, std::optional<PendingQuery> pending) {
  ScoreContext ctx;
  ctx.state = &state;
  ctx.completed = completed;
  ctx.fidelity = schedule.fidelity_at(completed + 1);
  ctx.pending = pending;
  ctx.remaining_h = remaining_h(schedule, completed);
  ctx.kbar = exploration_size(schedule, completed);
  ctx.validate();
  return ctx;
}

std::vector<PointId> query_candidates(const ScoreContext& ctx) {
  const ModelState& state = ctx.model();
  std::vector<PointId> out;
  for (std::size_t x = 0; x < state.size(); ++x) {
    const auto p = static_cast<PointId>(x);
    if (state.is_labeled(p, ctx.fidelity)) continue;
    if (ctx.fidelity == Fidelity::H && ctx.pending && ctx.pending->point == p) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace mfas
