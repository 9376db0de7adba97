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

#include "mfas/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

namespace mfas {

namespace {

std::uint64_t next_lineage() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void check_unit_open(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (0, 1), got " +
                          std::to_string(v));
  }
}

}  // namespace

std::vector<double> default_q_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

ModelState::ModelState(const PointPool& pool, ModelParams params)
    : pool_(&pool),
      gamma_(params.gamma),
      q_(params.q),
      lineage_(next_lineage()),
      counts_(2 * pool.size()),
      labels_(2 * pool.size(), -1) {
  check_unit_open(gamma_, "gamma");
  check_unit_open(q_, "damping factor q");
}

ModelState::ModelState(const ModelState& other)
    : pool_(other.pool_),
      gamma_(other.gamma_),
      q_(other.q_),
      lineage_(next_lineage()),
      counts_(other.counts_),
      labels_(other.labels_),
      observations_(other.observations_) {}

ModelState& ModelState::operator=(const ModelState& other) {
  if (this != &other) {
    pool_ = other.pool_;
    gamma_ = other.gamma_;
    q_ = other.q_;
    lineage_ = next_lineage();
    counts_ = other.counts_;
    labels_ = other.labels_;
    observations_ = other.observations_;
    journal_.clear();
    marks_.clear();
  }
  return *this;
}

ModelState ModelState::from_observations(const PointPool& pool, ModelParams params,
                                         std::span<const Observation> observations) {
  ModelState state(pool, params);
  for (const Observation& obs : observations) {
    pool.check_point(obs.point);
    auto& slot = state.labels_[index(obs.point, obs.fidelity)];
    if (slot >= 0) {
      throw StateError("duplicate observation of point " + std::to_string(obs.point) +
                       " on " + std::string(to_string(obs.fidelity)));
    }
    slot = obs.label ? 1 : 0;
    state.observations_.push_back(obs);
  }
  for (std::size_t x = 0; x < pool.size(); ++x) {
    const auto px = static_cast<PointId>(x);
    for (Fidelity f : {Fidelity::H, Fidelity::L}) {
      NeighborCounts c;
      const Fidelity g = other(f);
      if (auto own = state.label(px, g)) {
        c.tot_cross += 1.0;
        if (*own) c.pos_cross += 1.0;
      }
      for (const Neighbor& nb : pool.knn(px)) {
        if (auto y = state.label(nb.id, f)) {
          c.tot_same += nb.weight;
          if (*y) c.pos_same += nb.weight;
        }
        if (auto y = state.label(nb.id, g)) {
          c.tot_cross += nb.weight;
          if (*y) c.pos_cross += nb.weight;
        }
      }
      state.counts_[index(px, f)] = c;
    }
  }
  return state;
}

void ModelState::set_q(double q) {
  check_unit_open(q, "damping factor q");
  q_ = q;
}

Posterior ModelState::posterior(PointId x, Fidelity f) const {
  pool_->check_point(x);
  if (f != Fidelity::H && f != Fidelity::L) throw InvalidArgument("unknown fidelity");
  return Posterior{predict(x, f), x, f};
}

void ModelState::touch(std::size_t copy) {
  if (!marks_.empty()) {
    journal_.push_back(JournalEntry{static_cast<std::uint32_t>(copy), labels_[copy],
                                    counts_[copy]});
  }
}

std::vector<CopyRef> ModelState::update(const Observation& obs) {
  std::vector<CopyRef> affected;
  update(obs, affected);
  return affected;
}

void ModelState::update(const Observation& obs, std::vector<CopyRef>& affected) {
  pool_->check_point(obs.point);
  const std::size_t own = index(obs.point, obs.fidelity);
  if (labels_[own] >= 0) {
    throw StateError("duplicate observation of point " + std::to_string(obs.point) +
                     " on " + std::string(to_string(obs.fidelity)));
  }
  const double y = obs.label ? 1.0 : 0.0;
  touch(own);
  labels_[own] = obs.label ? 1 : 0;
  observations_.push_back(obs);

  const Fidelity f = obs.fidelity;
  const Fidelity g = other(f);
  {
    const std::size_t pair = index(obs.point, g);
    touch(pair);
    counts_[pair].pos_cross += y;
    counts_[pair].tot_cross += 1.0;
    affected.push_back(CopyRef{obs.point, g});
  }
  for (const Neighbor& nb : pool_->rknn(obs.point)) {
    const std::size_t same = index(nb.id, f);
    touch(same);
    counts_[same].pos_same += y * nb.weight;
    counts_[same].tot_same += nb.weight;
    affected.push_back(CopyRef{nb.id, f});

    const std::size_t cross = index(nb.id, g);
    touch(cross);
    counts_[cross].pos_cross += y * nb.weight;
    counts_[cross].tot_cross += nb.weight;
    affected.push_back(CopyRef{nb.id, g});
  }
}

double ModelState::pair_conditional(PointId x, bool y_l) const {
  pool_->check_point(x);
  if (is_labeled(x, Fidelity::H)) {
    throw StateError("pair_conditional on point " + std::to_string(x) +
                     " already labeled on H");
  }
  if (is_labeled(x, Fidelity::L)) return predict(x, Fidelity::H);
  const auto& c = counts_[index(x, Fidelity::H)];
  const double y = y_l ? 1.0 : 0.0;
  return (gamma_ + c.pos_same + q_ * (c.pos_cross + y)) /
         (1.0 + c.tot_same + q_ * (c.tot_cross + 1.0));
}

double ModelState::damping_log_likelihood(double q) const {
  double ll = 0.0;
  for (const Observation& obs : observations_) {
    const auto& c = counts_[index(obs.point, obs.fidelity)];
    const double p = (gamma_ + c.pos_same + q * c.pos_cross) /
                     (1.0 + c.tot_same + q * c.tot_cross);
    ll += std::log(obs.label ? p : 1.0 - p);
  }
  return ll;
}

double ModelState::estimate_damping(std::span<const double> grid) const {
  if (grid.empty()) throw InvalidArgument("damping grid is empty");
  for (double q : grid) check_unit_open(q, "damping grid value");
  if (observations_.empty()) {
    std::vector<double> sorted(grid.begin(), grid.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[sorted.size() / 2];
  }
  double best_q = grid.front();
  double best_ll = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (double q : grid) {
    const double ll = damping_log_likelihood(q);
    if (first || ll > best_ll || (ll == best_ll && q > best_q)) {
      best_q = q;
      best_ll = ll;
      first = false;
    }
  }
  return best_q;
}

SnapshotToken ModelState::snapshot() {
  marks_.push_back(Mark{journal_.size(), observations_.size(), q_});
  return SnapshotToken{lineage_, marks_.size() - 1, journal_.size()};
}

void ModelState::restore(const SnapshotToken& token) {
  if (token.lineage != lineage_ || token.depth >= marks_.size() ||
      marks_[token.depth].journal_size != token.journal_size) {
    throw StateError("stale snapshot token");
  }
  const Mark mark = marks_[token.depth];
  while (journal_.size() > mark.journal_size) {
    const JournalEntry& e = journal_.back();
    counts_[e.copy] = e.counts;
    labels_[e.copy] = e.label;
    journal_.pop_back();
  }
  observations_.resize(mark.observation_count);
  q_ = mark.q;
  marks_.resize(token.depth);
}

bool same_contents(const ModelState& a, const ModelState& b) {
  if (a.pool_ != b.pool_ || a.gamma_ != b.gamma_ || a.q_ != b.q_) return false;
  if (a.labels_ != b.labels_ || a.counts_ != b.counts_) return false;
  return a.observations_.size() == b.observations_.size();
}

}  // namespace mfas
