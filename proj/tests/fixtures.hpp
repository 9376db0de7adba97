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


// Random search states for property and oracle tests.

#ifndef MFAS_TESTS_FIXTURES_HPP_
#define MFAS_TESTS_FIXTURES_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/model.hpp"
#include "mfas/schedule.hpp"
#include "oracles.hpp"

namespace mfas::testing {

struct InstanceSpec {
  std::size_t n = 10;
  std::size_t k_nn = 3;
  int t = 3;
  int k = 1;
  std::optional<std::size_t> completed;  // random when unset
  double density = 0.2;
  double positive = 0.4;
  double w_lo = 1.0;
  double w_hi = 1.0;
  double q = 0.5;
  bool h_only = false;
};

// A pool, a consistent observation set and a scoring context for one
// iteration of a schedule. Heap members keep addresses stable on move.
struct Instance {
  std::unique_ptr<PointPool> pool;
  std::vector<Observation> obs;
  std::unique_ptr<ModelState> state;
  Schedule schedule{1, 0};
  std::size_t completed = 0;
  std::optional<PendingQuery> pending;
  ScoreContext ctx;

  BruteModel brute() const { return BruteModel(*pool, state->gamma(), state->q(), obs); }
  std::optional<PointId> pending_point() const {
    return pending ? std::optional<PointId>(pending->point) : std::nullopt;
  }
};

Instance random_instance(const InstanceSpec& spec, std::mt19937_64& rng);

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace mfas::testing

#endif  // MFAS_TESTS_FIXTURES_HPP_
