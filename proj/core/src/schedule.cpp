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

#include "mfas/schedule.hpp"

#include <string>

namespace mfas {

Schedule::Schedule(int t, int k) : t_(t), k_(k), total_(0) {
  if (t < 1) throw InvalidArgument("H budget t must be >= 1, got " + std::to_string(t));
  if (k < 0) throw InvalidArgument("k must be >= 0, got " + std::to_string(k));
  total_ = static_cast<std::size_t>(t) + static_cast<std::size_t>(k) * t - k;
}

Fidelity Schedule::fidelity_at(std::size_t i) const {
  if (i < 1 || i > total_) {
    throw InvalidArgument("iteration " + std::to_string(i) + " outside [1, " +
                          std::to_string(total_) + "]");
  }
  return (i - 1) % static_cast<std::size_t>(k_ + 1) == 0 ? Fidelity::H : Fidelity::L;
}

int Schedule::block_position(std::size_t i) const {
  if (fidelity_at(i) == Fidelity::H) return 0;
  return static_cast<int>((i - 1) % static_cast<std::size_t>(k_ + 1));
}

Schedule build_schedule(int t, int k) { return Schedule(t, k); }

int remaining_h(const Schedule& schedule, std::size_t completed) {
  if (completed >= schedule.total()) {
    throw InvalidArgument("completed count " + std::to_string(completed) +
                          " outside [0, " + std::to_string(schedule.total()) + ")");
  }
  const auto rest = schedule.total() - completed - 1;
  return static_cast<int>(rest / static_cast<std::size_t>(schedule.k() + 1));
}

int exploration_size(const Schedule& schedule, std::size_t completed) {
  const std::size_t i = completed + 1;
  const int j = schedule.block_position(i);
  return schedule.k() - j;
}

}  // namespace mfas
