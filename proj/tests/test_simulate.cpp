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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "mfas/policy.hpp"
#include "mfas/schedule.hpp"
#include "mfas/simulate.hpp"
#include "mfas/stats.hpp"
#include "oracles.hpp"

namespace mfas {
namespace {

std::string pattern(const Schedule& s) {
  std::string out;
  for (std::size_t i = 1; i <= s.total(); ++i) out += std::string(to_string(s.fidelity_at(i)));
  return out;
}

std::vector<std::uint8_t> labels_with_positives(std::size_t n, std::size_t positives) {
  std::vector<std::uint8_t> y(n, 0);
  for (std::size_t i = 0; i < positives; ++i) y[(i * 7) % n] = 1;
  return y;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("schedule layout") {
    const Schedule s = build_schedule(10, 2);
    CHECK(s.total() == 28);
    for (std::size_t i = 1; i <= 28; ++i) {
      CHECK((s.fidelity_at(i) == Fidelity::H) == ((i - 1) % 3 == 0));
    }
    CHECK(s.fidelity_at(28) == Fidelity::H);
    CHECK(build_schedule(1, 0).total() == 1);
    CHECK(build_schedule(1, 7).total() == 1);
    CHECK(pattern(build_schedule(2, 3)) == "HLLLH");
    CHECK(pattern(build_schedule(3, 0)) == "HHH");
    CHECK_THROWS_AS(build_schedule(0, 1), InvalidArgument);
    CHECK_THROWS_AS(build_schedule(2, -1), InvalidArgument);
    CHECK_THROWS_AS(s.fidelity_at(0), InvalidArgument);
    CHECK_THROWS_AS(s.fidelity_at(29), InvalidArgument);
  }

  TEST_CASE("remaining H count and exploration size") {
    const Schedule s = build_schedule(10, 2);
    CHECK(remaining_h(s, 0) == 9);
    CHECK(remaining_h(s, 3) == 8);
    CHECK(remaining_h(s, 27) == 0);
    CHECK_THROWS_AS(remaining_h(s, 28), InvalidArgument);
    CHECK(exploration_size(s, 0) == 2);
    CHECK(exploration_size(s, 1) == 1);
    CHECK(exploration_size(s, 2) == 0);
    CHECK(exploration_size(s, 3) == 2);
    // Formula versus the actual number of H queries after the current one.
    std::size_t undercounts = 0;
    for (std::size_t i = 0; i < s.total(); ++i) {
      int actual = 0;
      for (std::size_t j = i + 2; j <= s.total(); ++j) actual += s.fidelity_at(j) == Fidelity::H;
      CHECK(remaining_h(s, i) <= actual);
      CHECK(remaining_h(s, i) >= actual - 1);
      undercounts += remaining_h(s, i) != actual;
    }
    CHECK(undercounts == 18);  // every L iteration
  }

  TEST_CASE("flip counts") {
    CHECK(flip_count(50, 0.1) == 5);
    CHECK(flip_count(10, 0.3) == 3);
    CHECK(flip_count(5, 0.1) == 1);  // 0.5 rounds up
    CHECK(flip_count(4, 0.1) == 0);
    CHECK(flip_count(7, 0.0) == 0);
    CHECK_THROWS_AS(flip_count(5, 1.0), InvalidArgument);
    CHECK_THROWS_AS(flip_count(5, -0.1), InvalidArgument);
  }

  TEST_CASE("low-fidelity synthesis") {
    std::mt19937_64 rng(1);
    SUBCASE("theta zero copies the labels") {
      const auto y = labels_with_positives(100, 9);
      CHECK(synthesize_low_fidelity(y, 0.0, rng) == y);
    }
    SUBCASE("exact flip counts") {
      for (const double theta : {0.1, 0.3}) {
        const auto y = labels_with_positives(1000, 50);
        const auto yl = synthesize_low_fidelity(y, theta, rng);
        std::size_t lost = 0, gained = 0, l_pos = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          lost += y[i] && !yl[i];
          gained += !y[i] && yl[i];
          l_pos += yl[i];
        }
        CHECK(lost == flip_count(50, theta));
        CHECK(gained == flip_count(50, theta));
        CHECK(l_pos == 50);
        CHECK(static_cast<double>(gained) / static_cast<double>(l_pos) == doctest::Approx(theta));
      }
    }
    SUBCASE("ten positives at theta 0.3") {
      const auto y = labels_with_positives(40, 10);
      const auto yl = synthesize_low_fidelity(y, 0.3, rng);
      std::size_t lost = 0, gained = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        lost += y[i] && !yl[i];
        gained += !y[i] && yl[i];
      }
      CHECK(lost == 3);
      CHECK(gained == 3);
    }
    SUBCASE("seeded reproducibility") {
      const auto y = labels_with_positives(200, 20);
      std::mt19937_64 a(9), b(9);
      CHECK(synthesize_low_fidelity(y, 0.3, a) == synthesize_low_fidelity(y, 0.3, b));
    }
    SUBCASE("infeasible flips") {
      const std::vector<std::uint8_t> y{1, 1, 1, 0};
      CHECK_THROWS_AS(synthesize_low_fidelity(y, 0.9, rng), InvalidArgument);
    }
  }

  TEST_CASE("initial observation pair") {
    std::mt19937_64 rng(4);
    SUBCASE("single eligible point") {
      GroundTruth truth;
      truth.y_h = {0, 1, 1, 0};
      truth.y_l = {1, 0, 1, 0};
      for (int rep = 0; rep < 5; ++rep) {
        const auto init = init_observations(truth, rng);
        REQUIRE(init.size() == 2);
        CHECK(init[0] == Observation{2, Fidelity::H, true});
        CHECK(init[1] == Observation{2, Fidelity::L, true});
      }
    }
    SUBCASE("theta zero: every positive is eligible") {
      GroundTruth truth = make_ground_truth(labels_with_positives(50, 5), 0.0, rng);
      std::set<PointId> seen;
      for (int rep = 0; rep < 400; ++rep) seen.insert(init_observations(truth, rng)[0].point);
      std::set<PointId> positives;
      for (PointId i = 0; i < 50; ++i) {
        if (truth.y_h[i]) positives.insert(i);
      }
      CHECK(seen == positives);
    }
    SUBCASE("no eligible point") {
      GroundTruth truth;
      truth.y_h = {1, 0};
      truth.y_l = {0, 1};
      CHECK_THROWS_AS(init_observations(truth, rng), InvalidArgument);
    }
    SUBCASE("seeded") {
      GroundTruth truth = make_ground_truth(labels_with_positives(50, 10), 0.1, rng);
      std::mt19937_64 a(77), b(77);
      CHECK(init_observations(truth, a) == init_observations(truth, b));
    }
  }

  TEST_CASE("greedy on a star pool queries in descending posterior order") {
    // Point 0 is the seed; point i > 0 lists 0 with weight i / 10 and nothing
    // lists i, so labels of i never change other posteriors.
    const std::size_t n = 8;
    std::vector<std::vector<Neighbor>> knn(n);
    for (std::size_t i = 1; i < n; ++i) knn[i] = {{0, static_cast<double>(i) / 10.0}};
    const PointPool pool(DenseFeatures{1, std::vector<double>(n, 0.0)}, knn);
    GroundTruth truth;
    truth.y_h = {1, 0, 1, 0, 1, 0, 1, 0};
    truth.y_l = truth.y_h;
    RunConfig cfg;
    cfg.policy.type = PolicyType::Greedy;
    cfg.t = 5;
    cfg.k = 0;
    const RunTrace trace = run_experiment(cfg, pool, truth);
    REQUIRE(trace.steps.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(trace.steps[i].point == n - 1 - i);
    CHECK(trace.utility == 2);  // points 6 and 4
  }

  TEST_CASE("schedule contract for every policy") {
    std::mt19937_64 rng(8);
    const PointPool pool = testing::random_pool(40, 5, rng);
    std::vector<std::uint8_t> y(40, 0);
    for (std::size_t i = 0; i < 40; i += 4) y[i] = 1;
    std::mt19937_64 truth_rng(2);
    const GroundTruth truth = make_ground_truth(y, 0.2, truth_rng);
    for (const auto type : {PolicyType::Greedy, PolicyType::Uncertainty, PolicyType::MfUcb,
                            PolicyType::Ug, PolicyType::Ens, PolicyType::HEns, PolicyType::MfEns}) {
      CAPTURE(policy_name(type));
      RunConfig cfg;
      cfg.policy.type = type;
      cfg.t = 4;
      cfg.k = 2;
      cfg.seed = 3;
      const RunTrace trace = run_experiment(cfg, pool, truth);
      const int k = cfg.effective_k();
      CHECK(trace.steps.size() == static_cast<std::size_t>(4 + k * 4 - k));
      std::set<std::pair<PointId, int>> seen;
      std::size_t h = 0, utility = 0;
      for (const auto& o : trace.initial) seen.insert({o.point, static_cast<int>(o.fidelity)});
      for (const auto& st : trace.steps) {
        CHECK(seen.insert({st.point, static_cast<int>(st.fidelity)}).second);
        if (st.fidelity == Fidelity::H) {
          ++h;
          CHECK(st.label == (truth.y_h[st.point] != 0));
          utility += st.label;
        } else {
          CHECK(st.label == (truth.y_l[st.point] != 0));
        }
        CHECK(st.utility == utility);
        const auto& c = st.counters;
        CHECK(c.total_pruned + c.partial_pruned + c.fully_scored + c.skipped_by_cap == c.candidates);
      }
      CHECK(h == 4);
      CHECK(trace.utility == utility);
    }
  }

  TEST_CASE("runs are deterministic and independent of worker count") {
    std::mt19937_64 rng(12);
    const PointPool pool = testing::random_pool(60, 6, rng);
    std::vector<std::uint8_t> y(60, 0);
    for (std::size_t i = 0; i < 60; i += 5) y[i] = 1;
    std::mt19937_64 truth_rng(1);
    const GroundTruth truth = make_ground_truth(y, 0.1, truth_rng);
    RunConfig cfg;
    cfg.policy.type = PolicyType::MfEns;
    cfg.t = 5;
    cfg.k = 2;
    cfg.seed = 21;
    cfg.caps = SearchCaps{5, 5};
    cfg.wave_size = 3;
    const RunTrace a = run_experiment(cfg, pool, truth);
    const RunTrace b = run_experiment(cfg, pool, truth);
    cfg.workers = 3;
    const RunTrace c = run_experiment(cfg, pool, truth);
    CHECK(a.steps == b.steps);
    CHECK(a.steps == c.steps);
    CHECK(a.initial == c.initial);
  }

  TEST_CASE("invalid runs") {
    std::mt19937_64 rng(1);
    const PointPool pool = testing::random_pool(6, 2, rng);
    GroundTruth truth;
    truth.y_h = {1, 0, 0, 0, 0, 0};
    truth.y_l = truth.y_h;
    RunConfig cfg;
    cfg.t = 10;
    CHECK_THROWS_AS(run_experiment(cfg, pool, truth), InvalidArgument);
    cfg.t = 2;
    truth.y_l.pop_back();
    CHECK_THROWS_AS(run_experiment(cfg, pool, truth), InvalidArgument);
  }

  TEST_CASE("tiny instance: MF-ENS is not worse than greedy on average") {
    // n = 6, t = 2, k = 1 over 500 seeds, with the exact optimum as anchor.
    std::mt19937_64 rng(31);
    const PointPool pool = testing::random_pool(6, 2, rng);
    std::vector<double> mf, greedy;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      std::mt19937_64 truth_rng(seed);
      std::vector<std::uint8_t> y(6, 0);
      y[seed % 6] = 1;
      y[(seed / 6) % 6] = 1;
      const GroundTruth truth = make_ground_truth(y, 0.0, truth_rng);
      RunConfig cfg;
      cfg.t = 2;
      cfg.k = 1;
      cfg.seed = seed;
      cfg.policy.type = PolicyType::MfEns;
      mf.push_back(static_cast<double>(run_experiment(cfg, pool, truth).utility));
      cfg.policy.type = PolicyType::Greedy;
      greedy.push_back(static_cast<double>(run_experiment(cfg, pool, truth).utility));
    }
    const MeanSe a = mean_se(mf);
    const MeanSe b = mean_se(greedy);
    std::vector<double> diff(mf.size());
    for (std::size_t i = 0; i < mf.size(); ++i) diff[i] = mf[i] - greedy[i];
    const MeanSe d = mean_se(diff);
    MESSAGE("MF-ENS " << a.mean << " vs greedy " << b.mean << " (se of difference " << d.se << ")");
    CHECK(d.mean + 2.0 * d.se >= 0.0);
    CHECK(a.mean <= 2.0);
  }
}

}  // namespace mfas
