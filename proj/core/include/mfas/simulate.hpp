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

// Ground-truth synthesis and the sequential search loop.

#ifndef MFAS_SIMULATE_HPP_
#define MFAS_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mfas/context.hpp"
#include "mfas/model.hpp"
#include "mfas/pruning.hpp"

namespace mfas {

struct GroundTruth {
  std::vector<std::uint8_t> y_h;
  std::vector<std::uint8_t> y_l;
  double theta = 0.0;
  double r = 0.0;  // prevalence of y_H
};

// round-half-up(theta * |R|)
std::size_t flip_count(std::size_t positives, double theta);

// Copies y_H, then flips flip_count(|R|, theta) uniformly chosen positives to
// 0 and as many uniformly chosen negatives to 1.
std::vector<std::uint8_t> synthesize_low_fidelity(std::span<const std::uint8_t> y_h,
                                                  double theta, std::mt19937_64& rng);

GroundTruth make_ground_truth(std::vector<std::uint8_t> y_h, double theta,
                              std::mt19937_64& rng);

// (x, H, 1) and (x, L, 1) for a uniformly chosen x positive on both.
std::vector<Observation> init_observations(const GroundTruth& truth, std::mt19937_64& rng);

struct RunConfig {
  PolicyKind policy;
  int t = 1;
  int k = 0;
  std::uint64_t seed = 0;
  std::optional<SearchCaps> caps;  // policy defaults when unset
  ModelParams model;
  std::vector<double> q_grid = default_q_grid();
  std::size_t wave_size = 1;
  std::size_t workers = 1;
  // Echoed into traces only.
  std::string dataset;
  double theta = 0.0;

  SearchCaps effective_caps() const;
  // ENS ignores the L oracle and runs t H queries.
  int effective_k() const { return policy.single_fidelity() ? 0 : k; }
};

struct StepRecord {
  std::size_t iteration = 0;  // 1-based
  Fidelity fidelity = Fidelity::H;
  PointId point = 0;
  double score = 0.0;
  double posterior = 0.0;  // on the queried fidelity, at query time
  bool label = false;
  std::size_t utility = 0;  // cumulative H positives, counted when issued
  double q = 0.0;
  PruneCounters counters;
  double seconds = 0.0;  // wall time of the selection; kept out of traces

  friend bool operator==(const StepRecord& a, const StepRecord& b);
};

struct RunTrace {
  RunConfig config;
  std::vector<Observation> initial;
  std::vector<StepRecord> steps;
  std::size_t utility = 0;
};

// Runs the whole schedule. An H label is revealed to the model just before
// the next H query (or after the last query); L labels immediately. The seed
// observation does not count toward utility.
RunTrace run_experiment(const RunConfig& config, const PointPool& pool, const GroundTruth& truth);

}  // namespace mfas

#endif  // MFAS_SIMULATE_HPP_
