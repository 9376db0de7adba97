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

#ifndef MFAS_STATS_HPP_
#define MFAS_STATS_HPP_

#include <cstddef>
#include <span>

namespace mfas {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sd / sqrt(n); NaN when n < 2
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> values);

// p values below this are reported as "< kPValueFloor".
inline constexpr double kPValueFloor = 1e-12;

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  double mean_diff = 0.0;
};

// Two-sided paired t-test on a - b. Identical samples give t = 0, p = 1;
// constant nonzero differences give t = +-inf, p = 0.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace mfas

#endif  // MFAS_STATS_HPP_
