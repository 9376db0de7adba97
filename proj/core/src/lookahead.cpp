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

#include "mfas/lookahead.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mfas/rng.hpp"

namespace mfas {

namespace {

struct ValueId {
  double value;
  PointId id;
};

// Descending value, ascending id.
inline bool ranks_before(const ValueId& a, const ValueId& b) {
  return a.value > b.value || (a.value == b.value && a.id < b.id);
}

inline double exploration_value(double pil, double c1, double c0, double p_star) {
  return pil * std::max(c1 - p_star, 0.0) + (1.0 - pil) * std::max(c0 - p_star, 0.0);
}

// Relative slack added to bounds so that summation-order rounding in the
// exact score can never exceed them.
inline double with_slack(double v) { return v + 1e-12 * (1.0 + std::abs(v)); }

}  // namespace

struct LookaheadScorer::Base {
  std::vector<PointId> order;  // batch-eligible points, ranked
  std::vector<double> value;
  std::vector<PointId> xl_ids;  // unlabeled on both fidelities
  std::vector<double> xl_c1;
  std::vector<double> xl_c0;
  std::vector<double> xl_pil;
  std::vector<double> pi_l;  // L posterior of every point
};

struct LookaheadScorer::Scratch {
  struct Member {
    double v;
    double c1;
    double c0;
    double pil;
    PointId id;
  };

  explicit Scratch(std::size_t n) : mark(n, 0), batch_mark(n, 0) {}

  void next_mark() {
    if (++epoch == 0) {
      std::fill(mark.begin(), mark.end(), 0);
      epoch = 1;
    }
  }
  void next_batch_mark() {
    if (++batch_epoch == 0) {
      std::fill(batch_mark.begin(), batch_mark.end(), 0);
      batch_epoch = 1;
    }
  }
  bool marked(PointId z) const { return mark[z] == epoch; }
  // Returns true when z was not yet marked.
  bool set_mark(PointId z) {
    if (mark[z] == epoch) return false;
    mark[z] = epoch;
    return true;
  }

  std::vector<std::uint32_t> mark;
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> batch_mark;
  std::uint32_t batch_epoch = 0;

  std::vector<CopyRef> affected;
  std::vector<CopyRef> pending_affected;
  std::vector<PointId> changed;
  std::vector<ValueId> updates;
  std::vector<ValueId> batch;
  std::vector<double> prefix;
  std::vector<Member> members;
  std::vector<double> new_values;
  std::vector<double> new_prefix;
};

class LookaheadScorer::LookaheadWorker final : public PrunableScorer::Worker {
 public:
  explicit LookaheadWorker(const ModelState& state)
      : state_(state), scratch_(state.size()) {}
  ModelState state_;
  Scratch scratch_;
};

namespace {

// Sum of the `ell` largest values of (base minus marked points) united with
// `overrides` (already ranked).
template <typename Marks>
double top_with_overrides(const std::vector<PointId>& order, const std::vector<double>& value,
                          const Marks& is_marked, const std::vector<ValueId>& overrides,
                          int ell) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  int taken = 0;
  while (taken < ell) {
    while (i < order.size() && is_marked(order[i])) ++i;
    const bool has_base = i < order.size();
    const bool has_over = j < overrides.size();
    if (!has_base && !has_over) break;
    if (has_over && (!has_base || ranks_before(overrides[j], ValueId{value[i], order[i]}))) {
      sum += overrides[j++].value;
    } else {
      sum += value[i++];
    }
    ++taken;
  }
  return sum;
}

}  // namespace

LookaheadScorer::LookaheadScorer(const ScoreContext& ctx, int kbar)
    : ctx_(ctx), kbar_(kbar), ell_(0) {
  ctx_.validate();
  if (kbar < 0) throw InvalidArgument("exploration size must be nonnegative");
  ell_ = ctx_.lookahead_h();
  ModelState& state = ctx_.model();
  if (ctx_.pending) pending_ = ctx_.pending->point;
  candidates_ = query_candidates(ctx_);

  now_ = std::make_shared<const Base>(build_base(state));
  if (pending_) {
    pending_pi_ = state.predict(*pending_, Fidelity::H);
    for (int yp = 0; yp < 2; ++yp) {
      const auto token = state.snapshot();
      state.update(Observation{*pending_, Fidelity::H, yp == 1});
      pending_base_[yp] = std::make_shared<const Base>(build_base(state));
      state.restore(token);
    }
  }

  // Bound precomputation.
  const PointPool& pool = state.pool();
  const std::size_t n = state.size();
  pending_touch_.assign(n, 0);
  std::size_t removable = pool.max_reverse_degree() + 1;
  if (pending_) {
    for (const Neighbor& nb : pool.rknn(*pending_)) {
      pending_touch_[nb.id] = 1;
      if (batch_eligible(state, nb.id)) {
        pending_upgrades_.emplace_back(optimistic_posterior(state, nb.id, 1), nb.id);
      }
    }
    std::sort(pending_upgrades_.begin(), pending_upgrades_.end(),
              [](const auto& a, const auto& b) {
                return ranks_before(ValueId{a.first, a.second}, ValueId{b.first, b.second});
              });
    removable += pool.rknn(*pending_).size();

    std::vector<ValueId> overrides;
    overrides.reserve(pending_upgrades_.size());
    for (const auto& [v, z] : pending_upgrades_) overrides.push_back(ValueId{v, z});
    const auto& touch = pending_touch_;
    pending_only_top_ = top_with_overrides(
        now_->order, now_->value, [&](PointId z) { return touch[z] != 0; }, overrides, ell_);
  }

  if (ell_ > 0) {
    const std::size_t pos = static_cast<std::size_t>(ell_) - 1 + removable;
    p_star_floor_ = pos < now_->value.size() ? now_->value[pos] : 0.0;
  }

  if (kbar_ > 0) {
    const Base& b = *now_;
    vub_sorted_.reserve(b.xl_ids.size());
    for (std::size_t idx = 0; idx < b.xl_ids.size(); ++idx) {
      const PointId z = b.xl_ids[idx];
      ExploreBound e;
      e.id = z;
      if (pending_touch_[z]) {
        e.a = optimistic_posterior(state, z, 1, Fidelity::L);
        e.b = 1.0;
        e.c1 = optimistic_posterior(state, z, 2, Fidelity::H);
        e.c0 = optimistic_posterior(state, z, 1, Fidelity::H);
      } else {
        e.a = b.xl_pil[idx];
        e.b = 1.0 - b.xl_pil[idx];
        e.c1 = b.xl_c1[idx];
        e.c0 = b.xl_c0[idx];
      }
      e.v_floor = e.at(p_star_floor_);
      vub_sorted_.push_back(e);
    }
    std::sort(vub_sorted_.begin(), vub_sorted_.end(),
              [](const ExploreBound& a, const ExploreBound& b2) {
                return ranks_before(ValueId{a.v_floor, a.id}, ValueId{b2.v_floor, b2.id});
              });
  }
}

double LookaheadScorer::ExploreBound::at(double p) const {
  return a * std::max(c1 - p, 0.0) + b * std::max(c0 - p, 0.0);
}

bool LookaheadScorer::batch_eligible(const ModelState& state, PointId z) const {
  return !state.is_labeled(z, Fidelity::H) && !(pending_ && *pending_ == z);
}

LookaheadScorer::Base LookaheadScorer::build_base(const ModelState& state) const {
  Base b;
  const std::size_t n = state.size();
  std::vector<ValueId> ranked;
  ranked.reserve(n);
  b.pi_l.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = static_cast<PointId>(i);
    b.pi_l[i] = state.predict(z, Fidelity::L);
    if (!batch_eligible(state, z)) continue;
    ranked.push_back(ValueId{state.predict(z, Fidelity::H), z});
    if (!state.is_labeled(z, Fidelity::L)) {
      b.xl_ids.push_back(z);
      b.xl_c1.push_back(state.pair_conditional(z, true));
      b.xl_c0.push_back(state.pair_conditional(z, false));
      b.xl_pil.push_back(b.pi_l[i]);
    }
  }
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  b.order.reserve(ranked.size());
  b.value.reserve(ranked.size());
  for (const auto& r : ranked) {
    b.order.push_back(r.id);
    b.value.push_back(r.value);
  }
  return b;
}

std::vector<LookaheadScorer::Branch> LookaheadScorer::branches(const ModelState& state,
                                                               PointId x) const {
  std::vector<Branch> out;
  if (ctx_.fidelity == Fidelity::H) {
    const double pi = state.predict(x, Fidelity::H);
    out.push_back(Branch{pi, true, std::nullopt});
    out.push_back(Branch{1.0 - pi, false, std::nullopt});
  } else {
    const double pp = pending_pi_;
    const double b1 = pending_base_[1]->pi_l[x];
    const double b0 = pending_base_[0]->pi_l[x];
    out.push_back(Branch{pp * b1, true, true});
    out.push_back(Branch{pp * (1.0 - b1), false, true});
    out.push_back(Branch{(1.0 - pp) * b0, true, false});
    out.push_back(Branch{(1.0 - pp) * (1.0 - b0), false, false});
  }
  std::stable_sort(out.begin(), out.end(), [](const Branch& a, const Branch& b) {
    return a.probability > b.probability;
  });
  return out;
}

double LookaheadScorer::expected_batch_value(const ModelState& state, Scratch& sc,
                                             const Base& base,
                                             std::span<const PointId> changed,
                                             std::uint64_t mc_seed,
                                             BranchDetail* detail) const {
  if (detail) detail->exploration_mass = 1.0;
  if (ell_ == 0) return 0.0;

  sc.updates.clear();
  for (PointId z : changed) {
    if (batch_eligible(state, z)) sc.updates.push_back(ValueId{state.predict(z, Fidelity::H), z});
  }
  std::sort(sc.updates.begin(), sc.updates.end(), ranks_before);

  // Greedy H batch: merge the unchanged ranked list with the updated copies.
  sc.batch.clear();
  {
    std::size_t i = 0;
    std::size_t j = 0;
    const auto ell = static_cast<std::size_t>(ell_);
    while (sc.batch.size() < ell) {
      while (i < base.order.size() && sc.marked(base.order[i])) ++i;
      const bool has_base = i < base.order.size();
      const bool has_upd = j < sc.updates.size();
      if (!has_base && !has_upd) break;
      if (has_upd && (!has_base || ranks_before(sc.updates[j],
                                                ValueId{base.value[i], base.order[i]}))) {
        sc.batch.push_back(sc.updates[j++]);
      } else {
        sc.batch.push_back(ValueId{base.value[i], base.order[i]});
        ++i;
      }
    }
  }
  sc.prefix.assign(sc.batch.size() + 1, 0.0);
  for (std::size_t r = 0; r < sc.batch.size(); ++r) {
    sc.prefix[r + 1] = sc.prefix[r] + sc.batch[r].value;
  }
  const double batch_sum = sc.prefix.back();
  if (kbar_ == 0 || sc.batch.size() < static_cast<std::size_t>(ell_)) return batch_sum;

  const double p_star = sc.batch.back().value;
  sc.next_batch_mark();
  for (const auto& b : sc.batch) sc.batch_mark[b.id] = sc.batch_epoch;

  // Top-kbar exploration values, ties to the lower id.
  sc.members.clear();
  const auto kcap = static_cast<std::size_t>(kbar_);
  auto consider = [&](double v, double c1, double c0, double pil, PointId z) {
    if (sc.members.size() == kcap) {
      const auto& worst = sc.members.back();
      if (v < worst.v || (v == worst.v && z > worst.id)) return;
      sc.members.pop_back();
    }
    auto it = std::find_if(sc.members.begin(), sc.members.end(), [&](const Scratch::Member& m) {
      return v > m.v || (v == m.v && z < m.id);
    });
    sc.members.insert(it, Scratch::Member{v, c1, c0, pil, z});
  };
  for (std::size_t idx = 0; idx < base.xl_ids.size(); ++idx) {
    const PointId z = base.xl_ids[idx];
    if (sc.marked(z) || sc.batch_mark[z] == sc.batch_epoch) continue;
    const double v = exploration_value(base.xl_pil[idx], base.xl_c1[idx], base.xl_c0[idx], p_star);
    if (sc.members.size() == kcap) {
      const auto& worst = sc.members.back();
      if (v < worst.v || (v == worst.v && z > worst.id)) continue;
    }
    consider(v, base.xl_c1[idx], base.xl_c0[idx], base.xl_pil[idx], z);
  }
  for (PointId z : changed) {
    if (!batch_eligible(state, z) || state.is_labeled(z, Fidelity::L)) continue;
    if (sc.batch_mark[z] == sc.batch_epoch) continue;
    const double c1 = state.pair_conditional(z, true);
    const double c0 = state.pair_conditional(z, false);
    const double pil = state.predict(z, Fidelity::L);
    consider(exploration_value(pil, c1, c0, p_star), c1, c0, pil, z);
  }
  if (detail) {
    for (const auto& m : sc.members) {
      detail->exploration.push_back(m.id);
      detail->exploration_values.push_back(m.v);
    }
  }

  // Members with zero value cannot change the batch under any label.
  while (!sc.members.empty() && sc.members.back().v <= 0.0) sc.members.pop_back();
  if (sc.members.empty()) return batch_sum;

  const std::size_t m = sc.members.size();
  const std::size_t jmax = std::min<std::size_t>(m, static_cast<std::size_t>(ell_));
  sc.new_values.resize(m);
  sc.new_prefix.resize(m + 1);
  auto best_sum = [&]() {
    std::sort(sc.new_values.begin(), sc.new_values.end(), std::greater<>());
    sc.new_prefix[0] = 0.0;
    for (std::size_t r = 0; r < m; ++r) sc.new_prefix[r + 1] = sc.new_prefix[r] + sc.new_values[r];
    double best = sc.prefix[static_cast<std::size_t>(ell_)];
    for (std::size_t j = 1; j <= jmax; ++j) {
      best = std::max(best, sc.new_prefix[j] + sc.prefix[static_cast<std::size_t>(ell_) - j]);
    }
    return best;
  };

  double expected = 0.0;
  if (m <= static_cast<std::size_t>(ctx_.max_exact_exploration)) {
    double mass = 0.0;
    const std::size_t outcomes = std::size_t{1} << m;
    for (std::size_t mask = 0; mask < outcomes; ++mask) {
      double prob = 1.0;
      for (std::size_t r = 0; r < m; ++r) {
        const auto& mem = sc.members[r];
        const bool y = (mask >> r) & 1U;
        prob *= y ? mem.pil : 1.0 - mem.pil;
        sc.new_values[r] = y ? mem.c1 : mem.c0;
      }
      expected += prob * best_sum();
      mass += prob;
    }
    if (detail) detail->exploration_mass = mass;
  } else {
    std::mt19937_64 rng(mc_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t samples = std::max<std::size_t>(ctx_.mc_samples, 1);
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t r = 0; r < m; ++r) {
        const auto& mem = sc.members[r];
        sc.new_values[r] = unit(rng) < mem.pil ? mem.c1 : mem.c0;
      }
      expected += best_sum();
    }
    expected /= static_cast<double>(samples);
  }
  return expected;
}

double LookaheadScorer::branch_value(ModelState& state, Scratch& sc, PointId x,
                                     const Branch& branch, std::size_t branch_index,
                                     BranchDetail* detail) const {
  const auto token = state.snapshot();
  const Base* base = now_.get();
  if (branch.pending_label) {
    sc.pending_affected.clear();
    state.update(Observation{*pending_, Fidelity::H, *branch.pending_label}, sc.pending_affected);
    base = pending_base_[*branch.pending_label ? 1 : 0].get();
  }
  sc.affected.clear();
  state.update(Observation{x, ctx_.fidelity, branch.query_label}, sc.affected);

  sc.next_mark();
  sc.changed.clear();
  for (const CopyRef& c : sc.affected) {
    if (sc.set_mark(c.point)) sc.changed.push_back(c.point);
  }
  const std::uint64_t mc_seed =
      derive_seed(ctx_.seed, {static_cast<std::uint64_t>(x), branch_index, ctx_.completed});
  double value = expected_batch_value(state, sc, *base, sc.changed, mc_seed, detail);
  if (ctx_.fidelity == Fidelity::H && branch.query_label) value += 1.0;
  state.restore(token);
  if (detail) {
    detail->probability = branch.probability;
    detail->query_label = branch.query_label;
    detail->pending_label = branch.pending_label;
    detail->value = value;
  }
  return value;
}

std::optional<double> LookaheadScorer::run(ModelState& state, Scratch& sc, PointId x,
                                           double u_bar, double u_lower,
                                           const Incumbent* incumbent,
                                           std::vector<BranchDetail>* details) const {
  const auto plan = branches(state, x);
  double acc = 0.0;
  for (std::size_t b = 0; b < plan.size(); ++b) {
    BranchDetail* detail = nullptr;
    if (details) detail = &details->emplace_back();
    acc += plan[b].probability * branch_value(state, sc, x, plan[b], b, detail);
    if (incumbent && b + 1 < plan.size()) {
      double partial = acc;
      for (std::size_t r = b + 1; r < plan.size(); ++r) {
        partial += plan[r].probability * (plan[r].query_label ? u_bar : u_lower);
      }
      if (incumbent->dominates(partial, x)) return std::nullopt;
    }
  }
  return acc;
}

std::unique_ptr<PrunableScorer::Worker> LookaheadScorer::make_worker() const {
  return std::make_unique<LookaheadWorker>(ctx_.model());
}

std::optional<double> LookaheadScorer::evaluate(Worker& worker, const BoundEntry& bound,
                                                const Incumbent* incumbent) const {
  auto& w = static_cast<LookaheadWorker&>(worker);
  return run(w.state_, w.scratch_, bound.point, bound.u_bar, bound.u_lower, incumbent, nullptr);
}

double LookaheadScorer::score(PointId x) const {
  ctx_.model().pool().check_point(x);
  LookaheadWorker w(ctx_.model());
  return *run(w.state_, w.scratch_, x, 0.0, 0.0, nullptr, nullptr);
}

std::vector<BranchDetail> LookaheadScorer::explain(PointId x) const {
  ctx_.model().pool().check_point(x);
  LookaheadWorker w(ctx_.model());
  std::vector<BranchDetail> details;
  run(w.state_, w.scratch_, x, 0.0, 0.0, nullptr, &details);
  return details;
}

double LookaheadScorer::exploration_bound(PointId x, double p_lo, Scratch& sc) const {
  if (kbar_ == 0 || ell_ == 0) return 0.0;
  const ModelState& state = ctx_.model();
  const PointPool& pool = state.pool();
  const auto kcap = static_cast<std::size_t>(kbar_);
  sc.next_mark();
  sc.set_mark(x);
  // Top kbar values, kept descending in sc.new_values.
  std::vector<double>& top = sc.new_values;
  top.clear();
  auto offer = [&](double v) {
    if (top.size() == kcap) {
      if (v <= top.back()) return;
      top.pop_back();
    }
    top.insert(std::upper_bound(top.begin(), top.end(), v, std::greater<>()), v);
  };
  for (const Neighbor& nb : pool.rknn(x)) {
    const PointId z = nb.id;
    if (!sc.set_mark(z)) continue;
    if (!batch_eligible(state, z) || state.is_labeled(z, Fidelity::L)) continue;
    const int j = 1 + (pending_touch_[z] ? 1 : 0);
    const double c1 = optimistic_posterior(state, z, j + 1, Fidelity::H);
    const double c0 = optimistic_posterior(state, z, j, Fidelity::H);
    const double pil = optimistic_posterior(state, z, j, Fidelity::L);
    offer(pil * std::max(c1 - p_lo, 0.0) + std::max(c0 - p_lo, 0.0));
  }
  // Values at p_lo never exceed those at the floor, so the scan can stop once
  // the floor values cannot enter the running top kbar.
  for (const ExploreBound& e : vub_sorted_) {
    if (top.size() == kcap && e.v_floor <= top.back()) break;
    if (sc.marked(e.id)) continue;
    offer(e.at(p_lo));
  }
  double sum = 0.0;
  for (double v : top) sum += v;
  return sum;
}

BoundEntry LookaheadScorer::bound(PointId x) const {
  ctx_.model().pool().check_point(x);
  Scratch sc(ctx_.model().size());
  return bound_with(x, sc);
}

std::vector<BoundEntry> LookaheadScorer::bounds() const {
  Scratch sc(ctx_.model().size());
  std::vector<BoundEntry> out;
  out.reserve(candidates_.size());
  for (PointId x : candidates_) out.push_back(bound_with(x, sc));
  return out;
}

BoundEntry LookaheadScorer::bound_with(PointId x, Scratch& sc) const {
  const ModelState& state = ctx_.model();
  const PointPool& pool = state.pool();
  BoundEntry e;
  e.point = x;
  const bool h_query = ctx_.fidelity == Fidelity::H;
  if (h_query) {
    e.pi = state.predict(x, Fidelity::H);
  } else {
    e.pi = pending_pi_ * pending_base_[1]->pi_l[x] +
           (1.0 - pending_pi_) * pending_base_[0]->pi_l[x];
  }

  double top_pos = 0.0;
  double top_neg = 0.0;
  double p_lo = 0.0;
  if (ell_ > 0) {
    std::vector<ValueId>& over = sc.updates;
    over.clear();
    sc.next_mark();
    if (h_query) {
      sc.set_mark(x);
      top_neg = top_with_overrides(
          now_->order, now_->value, [&](PointId z) { return sc.marked(z); }, over, ell_);
      for (const Neighbor& nb : pool.rknn(x)) {
        if (sc.set_mark(nb.id) && batch_eligible(state, nb.id)) {
          over.push_back(ValueId{optimistic_posterior(state, nb.id, 1), nb.id});
        }
      }
    } else {
      top_neg = pending_only_top_;
      auto add = [&](PointId z) {
        if (!sc.set_mark(z)) return;
        if (!batch_eligible(state, z)) return;
        over.push_back(ValueId{optimistic_posterior(state, z, 1 + (pending_touch_[z] ? 1 : 0)), z});
      };
      add(x);
      for (const Neighbor& nb : pool.rknn(x)) add(nb.id);
      for (const auto& [v, z] : pending_upgrades_) {
        if (sc.set_mark(z)) over.push_back(ValueId{v, z});
      }
    }
    std::sort(over.begin(), over.end(), ranks_before);
    top_pos = top_with_overrides(
        now_->order, now_->value, [&](PointId z) { return sc.marked(z); }, over, ell_);
    // Every branch batch holds l_H values at least the l_H-th largest
    // posterior among points no branch observation can touch.
    int seen = 0;
    for (std::size_t i = 0; i < now_->order.size(); ++i) {
      if (sc.marked(now_->order[i])) continue;
      if (++seen == ell_) {
        p_lo = now_->value[i];
        break;
      }
    }
  }
  const double explore = exploration_bound(x, p_lo, sc);
  e.u_bar = with_slack((h_query ? 1.0 : 0.0) + top_pos + explore);
  e.u_lower = with_slack(top_neg + explore);
  e.bound = e.pi * e.u_bar + (1.0 - e.pi) * e.u_lower;
  return e;
}

}  // namespace mfas
