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

// Multifidelity k-nearest-neighbor classifier.
//
// Every point x has two copies, x_H and x_L. The neighbor set of x_H is
//   {x_L} u {x'_H : x' in knn(x)} u {x'_L : x' in knn(x)}
// and symmetrically for x_L. Neighbors on the other fidelity (including the
// paired copy, whose base weight is 1) have their weight multiplied by the
// damping factor q. The posterior of a copy is
//   (gamma + sum of weights of positive labeled neighbors)
//     / (1 + sum of weights of labeled neighbors).
//
// Same-fidelity and cross-fidelity sums are stored separately so that q can
// change without touching the counts.

#ifndef MFAS_MODEL_HPP_
#define MFAS_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfas/point_pool.hpp"
#include "mfas/types.hpp"

namespace mfas {

struct ModelParams {
  double gamma = 0.05;
  double q = 0.5;
};

// {0.05, 0.10, ..., 0.95}
std::vector<double> default_q_grid();

struct Posterior {
  double value = 0.0;
  PointId point = 0;
  Fidelity fidelity = Fidelity::H;
};

// Accumulated labeled-neighbor weight of one copy, split by whether the
// contributing neighbor is on the same fidelity or the other one.
struct NeighborCounts {
  double pos_same = 0.0;
  double tot_same = 0.0;
  double pos_cross = 0.0;
  double tot_cross = 0.0;

  friend bool operator==(const NeighborCounts&, const NeighborCounts&) = default;
};

struct SnapshotToken {
  std::uint64_t lineage = 0;
  std::size_t depth = 0;
  std::size_t journal_size = 0;
};

class ModelState {
 public:
  ModelState(const PointPool& pool, ModelParams params = {});
  ModelState(PointPool&&, ModelParams = {}) = delete;

  // Copies get a fresh lineage: snapshot tokens never cross copies.
  ModelState(const ModelState& other);
  ModelState& operator=(const ModelState& other);
  ModelState(ModelState&&) noexcept = default;
  ModelState& operator=(ModelState&&) noexcept = default;

  // Reference construction: every copy's counts are summed over its forward
  // neighbor set. Independent of the incremental reverse-adjacency path.
  static ModelState from_observations(const PointPool& pool, ModelParams params,
                                      std::span<const Observation> observations);

  const PointPool& pool() const { return *pool_; }
  std::size_t size() const { return pool_->size(); }
  double gamma() const { return gamma_; }
  double q() const { return q_; }
  void set_q(double q);

  std::span<const Observation> observations() const { return observations_; }

  std::optional<bool> label(PointId x, Fidelity f) const {
    const auto v = labels_[index(x, f)];
    if (v < 0) return std::nullopt;
    return v == 1;
  }
  bool is_labeled(PointId x, Fidelity f) const { return labels_[index(x, f)] >= 0; }

  const NeighborCounts& counts(PointId x, Fidelity f) const {
    return counts_[index(x, f)];
  }
  double pos_weight(PointId x, Fidelity f) const {
    const auto& c = counts_[index(x, f)];
    return c.pos_same + q_ * c.pos_cross;
  }
  double tot_weight(PointId x, Fidelity f) const {
    const auto& c = counts_[index(x, f)];
    return c.tot_same + q_ * c.tot_cross;
  }

  // Posterior probability of a positive label for x on fidelity f. Labeled
  // copies are allowed; their own label is not in their neighbor set.
  double predict(PointId x, Fidelity f) const {
    const auto& c = counts_[index(x, f)];
    return (gamma_ + c.pos_same + q_ * c.pos_cross) /
           (1.0 + c.tot_same + q_ * c.tot_cross);
  }

  // Checked variant of predict.
  Posterior posterior(PointId x, Fidelity f) const;

  // Adds an observation and returns the copies whose counts changed: the
  // paired copy of the observed point plus both copies of every point that
  // lists it as a neighbor. Throws StateError on a duplicate observation.
  std::vector<CopyRef> update(const Observation& obs);

  // Same as update but appends the affected copies to `affected`.
  void update(const Observation& obs, std::vector<CopyRef>& affected);

  // Pr(y_H = 1 | x, y_L, D): the H posterior after adding (x, L, y_L).
  // Unchanged from predict(x, H) when x is already labeled on L.
  // Throws StateError if x is labeled on H.
  double pair_conditional(PointId x, bool y_l) const;

  // Maximum-likelihood damping factor over `grid`, using the leave-one-out
  // predictive probability of every observation. Ties go to the larger q.
  // Does not modify the state.
  double estimate_damping(std::span<const double> grid) const;

  // Log-likelihood of all observations under damping factor q.
  double damping_log_likelihood(double q) const;

  SnapshotToken snapshot();
  // Reverts observations, labels, counts and q to the captured state.
  // Restoring an outer token discards every snapshot nested inside it.
  // Throws StateError for tokens not on this state's open snapshot stack.
  void restore(const SnapshotToken& token);
  std::size_t open_snapshots() const { return marks_.size(); }

  friend bool same_contents(const ModelState& a, const ModelState& b);

 private:
  struct JournalEntry {
    std::uint32_t copy;
    std::int8_t label;
    NeighborCounts counts;
  };
  struct Mark {
    std::size_t journal_size;
    std::size_t observation_count;
    double q;
  };

  static std::size_t index(PointId x, Fidelity f) {
    return 2 * static_cast<std::size_t>(x) + static_cast<std::size_t>(f);
  }
  void touch(std::size_t copy);

  const PointPool* pool_;
  double gamma_;
  double q_;
  std::uint64_t lineage_;
  std::vector<NeighborCounts> counts_;
  std::vector<std::int8_t> labels_;
  std::vector<Observation> observations_;
  std::vector<JournalEntry> journal_;
  std::vector<Mark> marks_;
};

// True when observations (as a set), labels, q and all counts agree exactly.
bool same_contents(const ModelState& a, const ModelState& b);

}  // namespace mfas

#endif  // MFAS_MODEL_HPP_
