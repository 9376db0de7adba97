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


#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace mfas::testing {

Instance random_instance(const InstanceSpec& spec, std::mt19937_64& rng) {
  for (;;) {
    Instance inst;
    inst.pool = std::make_unique<PointPool>(random_pool(spec.n, spec.k_nn, rng, spec.w_lo, spec.w_hi));
    inst.obs = random_observations(spec.n, spec.density, spec.positive, rng, spec.h_only);
    inst.schedule = Schedule(spec.t, spec.k);
    if (spec.completed) {
      inst.completed = *spec.completed;
    } else {
      inst.completed = std::uniform_int_distribution<std::size_t>(0, inst.schedule.total() - 1)(rng);
    }
    const std::size_t i = inst.completed + 1;
    const Fidelity f = inst.schedule.fidelity_at(i);
    std::vector<PointId> free_h;
    for (PointId x = 0; x < spec.n; ++x) {
      const bool labeled = std::any_of(inst.obs.begin(), inst.obs.end(), [&](const Observation& o) {
        return o.point == x && o.fidelity == Fidelity::H;
      });
      if (!labeled) free_h.push_back(x);
    }
    if (f == Fidelity::L) {
      if (free_h.empty()) continue;
      const PointId p = free_h[std::uniform_int_distribution<std::size_t>(0, free_h.size() - 1)(rng)];
      inst.pending = PendingQuery{p, inst.schedule.block_position(i) - 1};
    }
    inst.state = std::make_unique<ModelState>(*inst.pool, ModelParams{0.05, spec.q});
    for (const auto& o : inst.obs) inst.state->update(o);
    inst.ctx = make_context(*inst.state, inst.schedule, inst.completed, inst.pending);
    if (query_candidates(inst.ctx).empty()) continue;
    return inst;
  }
}

TempDir::TempDir(const std::string& label) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("mfas-" + label + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mfas::testing
