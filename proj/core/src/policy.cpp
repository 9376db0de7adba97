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

#include "mfas/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "mfas/lookahead.hpp"
#include "mfas/rng.hpp"

namespace mfas {

double greedy_score(const ScoreContext& ctx, PointId x) {
  ctx.model().pool().check_point(x);
  return ctx.model().predict(x, Fidelity::H);
}

double uncertainty_score(const ScoreContext& ctx, PointId x) {
  ctx.model().pool().check_point(x);
  return -std::abs(ctx.model().predict(x, Fidelity::L) - 0.5);
}

double ucb_score(const ScoreContext& ctx, PointId x, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("UCB beta must be nonnegative");
  ctx.model().pool().check_point(x);
  const double pi = ctx.model().predict(x, ctx.fidelity);
  return pi + beta * std::sqrt(pi * (1.0 - pi));
}

double top_sum(std::span<const double> probs, int ell) {
  if (ell < 0) throw InvalidArgument("top_sum count must be nonnegative");
  std::vector<double> v(probs.begin(), probs.end());
  const auto m = std::min<std::size_t>(static_cast<std::size_t>(ell), v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end(),
                    std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += v[i];
  return sum;
}

double hens_score(const ScoreContext& ctx, PointId x) {
  ctx.model().pool().check_point(x);
  return LookaheadScorer(ctx, 0).score(x);
}

double mfens_score(const ScoreContext& ctx, PointId x) {
  ctx.model().pool().check_point(x);
  return LookaheadScorer(ctx, ctx.kbar).score(x);
}

double ens_score(const ScoreContext& ctx, PointId x) {
  if (ctx.fidelity != Fidelity::H) throw InvalidArgument("ENS scores H queries only");
  ModelState state(ctx.model());
  state.pool().check_point(x);
  if (state.is_labeled(x, Fidelity::H)) throw InvalidArgument("point already labeled on H");
  const int ell = ctx.lookahead_h();
  const double pi = state.predict(x, Fidelity::H);
  double score = pi;
  std::vector<double> probs;
  for (const bool y : {true, false}) {
    const auto token = state.snapshot();
    state.update(Observation{x, Fidelity::H, y});
    probs.clear();
    for (std::size_t z = 0; z < state.size(); ++z) {
      const auto p = static_cast<PointId>(z);
      if (!state.is_labeled(p, Fidelity::H)) probs.push_back(state.predict(p, Fidelity::H));
    }
    score += (y ? pi : 1.0 - pi) * top_sum(probs, ell);
    state.restore(token);
  }
  return score;
}

double value_v(const ScoreContext& ctx, PointId x, double p_star) {
  const ModelState& state = ctx.model();
  state.pool().check_point(x);
  if (state.is_labeled(x, Fidelity::H)) return 0.0;
  const double pil = state.predict(x, Fidelity::L);
  const double c1 = state.pair_conditional(x, true);
  const double c0 = state.pair_conditional(x, false);
  return pil * std::max(c1 - p_star, 0.0) + (1.0 - pil) * std::max(c0 - p_star, 0.0);
}

ExplorationBatch build_L_batch(const ScoreContext& ctx, std::span<const PointId> greedy_batch,
                               double p_star) {
  const ModelState& state = ctx.model();
  std::vector<char> in_batch(state.size(), 0);
  for (PointId z : greedy_batch) {
    state.pool().check_point(z);
    in_batch[z] = 1;
  }
  std::vector<std::pair<double, PointId>> scored;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto z = static_cast<PointId>(i);
    if (in_batch[z] || state.is_labeled(z, Fidelity::H) || state.is_labeled(z, Fidelity::L)) {
      continue;
    }
    if (ctx.pending && ctx.pending->point == z) continue;
    scored.emplace_back(value_v(ctx, z, p_star), z);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  ExplorationBatch out;
  const auto m = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(ctx.kbar));
  for (std::size_t i = 0; i < m; ++i) {
    out.points.push_back(scored[i].second);
    out.vscores.push_back(scored[i].first);
  }
  return out;
}

namespace {

struct HiddenQuery {
  PointId point;
  bool counted;
};

class Expectimax {
 public:
  Expectimax(ModelState& state, const Schedule& schedule)
      : state_(state), schedule_(schedule) {}

  // Expected utility of the best continuation after `completed` iterations.
  double value(std::size_t completed, std::optional<HiddenQuery> pending) {
    if (completed == schedule_.total()) {
      if (pending && pending->counted) return state_.predict(pending->point, Fidelity::H);
      return 0.0;
    }
    if (pending && schedule_.fidelity_at(completed + 1) == Fidelity::H) {
      const double pi = state_.predict(pending->point, Fidelity::H);
      double total = 0.0;
      for (const bool y : {true, false}) {
        const auto token = state_.snapshot();
        state_.update(Observation{pending->point, Fidelity::H, y});
        const double gain = (y && pending->counted) ? 1.0 : 0.0;
        total += (y ? pi : 1.0 - pi) * (gain + best(completed, std::nullopt));
        state_.restore(token);
      }
      return total;
    }
    return best(completed, pending);
  }

  double best(std::size_t completed, std::optional<HiddenQuery> pending) {
    double out = 0.0;
    bool any = false;
    for (const auto& [x, v] : candidates(completed, pending)) {
      out = any ? std::max(out, v) : v;
      any = true;
    }
    if (!any) throw StateError("pool exhausted during exact search");
    return out;
  }

  std::vector<std::pair<PointId, double>> candidates(std::size_t completed,
                                                     std::optional<HiddenQuery> pending) {
    const Fidelity f = schedule_.fidelity_at(completed + 1);
    std::vector<std::pair<PointId, double>> out;
    for (std::size_t i = 0; i < state_.size(); ++i) {
      const auto x = static_cast<PointId>(i);
      if (state_.is_labeled(x, f)) continue;
      if (f == Fidelity::H && pending && pending->point == x) continue;
      double v = 0.0;
      if (f == Fidelity::H) {
        v = value(completed + 1, HiddenQuery{x, true});
      } else {
        const double pi = state_.predict(x, Fidelity::L);
        for (const bool y : {true, false}) {
          const auto token = state_.snapshot();
          state_.update(Observation{x, Fidelity::L, y});
          v += (y ? pi : 1.0 - pi) * value(completed + 1, pending);
          state_.restore(token);
        }
      }
      out.emplace_back(x, v);
    }
    return out;
  }

 private:
  ModelState& state_;
  const Schedule& schedule_;
};

}  // namespace

ExactResult exact_expected_utility(const ScoreContext& ctx, const Schedule& schedule,
                                   ExactGuard guard) {
  ctx.validate();
  const ModelState& base = ctx.model();
  if (base.size() > guard.max_points) throw InvalidArgument("instance too large for exact search");
  if (ctx.completed >= schedule.total()) throw InvalidArgument("schedule already complete");
  if (schedule.total() - ctx.completed > guard.max_remaining) {
    throw InvalidArgument("too many remaining queries for exact search");
  }
  if (schedule.fidelity_at(ctx.completed + 1) != ctx.fidelity) {
    throw InvalidArgument("context fidelity does not match the schedule");
  }
  ModelState state(base);
  Expectimax search(state, schedule);
  std::optional<HiddenQuery> pending;
  if (ctx.pending) pending = HiddenQuery{ctx.pending->point, false};

  ExactResult result;
  result.candidates = search.candidates(ctx.completed, pending);
  if (result.candidates.empty()) throw StateError("no candidates for exact search");
  bool first = true;
  for (const auto& [x, v] : result.candidates) {
    if (first || v > result.value) {
      result.point = x;
      result.value = v;
      first = false;
    }
  }
  return result;
}

namespace {

template <typename Score>
Selection direct_argmax(const std::vector<PointId>& candidates, Score score) {
  Selection best;
  bool first = true;
  for (PointId x : candidates) {
    const double s = score(x);
    if (first || s > best.score) {
      best.point = x;
      best.score = s;
      first = false;
    }
  }
  best.counters.candidates = candidates.size();
  best.counters.fully_scored = candidates.size();
  return best;
}

}  // namespace

Selection select_query(const PolicyKind& policy, const ScoreContext& ctx) {
  policy.validate();
  ctx.validate();
  const std::vector<PointId> candidates = query_candidates(ctx);
  if (candidates.empty()) throw StateError("no eligible candidates");
  const ModelState& state = ctx.model();
  const bool h_query = ctx.fidelity == Fidelity::H;

  switch (policy.type) {
    case PolicyType::Greedy:
      return direct_argmax(candidates, [&](PointId x) { return state.predict(x, ctx.fidelity); });
    case PolicyType::Uncertainty:
      return direct_argmax(candidates, [&](PointId x) {
        return -std::abs(state.predict(x, ctx.fidelity) - 0.5);
      });
    case PolicyType::MfUcb: {
      const double beta = h_query ? policy.beta_h : policy.beta_l;
      return direct_argmax(candidates, [&](PointId x) { return ucb_score(ctx, x, beta); });
    }
    case PolicyType::Ug:
      if (h_query) {
        return direct_argmax(candidates, [&](PointId x) { return state.predict(x, Fidelity::H); });
      }
      return direct_argmax(candidates, [&](PointId x) { return uncertainty_score(ctx, x); });
    case PolicyType::Ens:
    case PolicyType::HEns:
    case PolicyType::MfEns: {
      if (policy.type == PolicyType::Ens && !h_query) {
        throw InvalidArgument("ENS runs on H queries only");
      }
      const int kbar = policy.type == PolicyType::MfEns ? ctx.kbar : 0;
      const LookaheadScorer scorer(ctx, kbar);
      std::mt19937_64 rng(derive_seed(ctx.seed, {tag("subset"), ctx.completed}));
      const LazyResult r = lazy_argmax(ctx, scorer, scorer.bounds(), rng);
      return Selection{r.point, r.f_star, r.counters};
    }
  }
  throw InvalidArgument("unknown policy");
}

}  // namespace mfas
