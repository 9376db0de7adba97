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

#ifndef MFAS_SCHEDULE_HPP_
#define MFAS_SCHEDULE_HPP_

#include <cstddef>

#include "mfas/types.hpp"

namespace mfas {

// Query schedule for an H budget of t with k L queries per H query.
// Iterations are numbered 1..T with T = t + k*t - k; iteration i is an H
// query when (i - 1) is a multiple of k + 1, so the final iteration is H.
class Schedule {
 public:
  Schedule(int t, int k);

  int t() const { return t_; }
  int k() const { return k_; }
  std::size_t total() const { return total_; }

  // i is 1-based.
  Fidelity fidelity_at(std::size_t i) const;

  // Position of an L iteration inside its block: 1 for the first L query
  // after an H query, up to k. Zero for H iterations.
  int block_position(std::size_t i) const;

 private:
  int t_;
  int k_;
  std::size_t total_;
};

Schedule build_schedule(int t, int k);

// floor((T - i - 1) / (k + 1)) for 0 <= i < T completed queries.
int remaining_h(const Schedule& schedule, std::size_t completed);

// Size of the exploratory L batch for the query at iteration completed + 1:
// k for H queries, k - j for the j-th L query of a block.
int exploration_size(const Schedule& schedule, std::size_t completed);

}  // namespace mfas

#endif  // MFAS_SCHEDULE_HPP_
