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

// Dataset ingestion, synthetic pools, exact k-NN graphs and graph caching.

#ifndef MFAS_DATA_HPP_
#define MFAS_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfas/point_pool.hpp"

namespace mfas {

enum class Metric : std::uint8_t { Euclidean = 0, Jaccard = 1 };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);

// Uniform: every neighbor has weight 1. Similarity: 1 / (1 + d) for
// euclidean distance d, 1 - d (floored at 1e-6) for jaccard distance d.
enum class Weighting : std::uint8_t { Uniform = 0, Similarity = 1 };

std::string_view weighting_name(Weighting w);
Weighting parse_weighting(std::string_view name);

struct SyntheticParams {
  std::size_t n = 2000;
  std::size_t dims = 2;
  std::size_t clusters = 40;
  std::size_t positive_clusters = 4;
  double r = 0.05;       // prevalence; exactly round(r * n) positives
  double spread = 0.02;  // within-cluster standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

struct DatasetSpec {
  std::string name = "synthetic";
  std::optional<std::filesystem::path> csv;
  std::optional<SyntheticParams> synthetic;
  std::size_t k = 50;  // neighbors per point
  std::optional<Metric> metric;  // default: jaccard for binary CSVs, else euclidean
  Weighting weighting = Weighting::Uniform;
  std::string label_column = "label";
  std::optional<std::filesystem::path> cache_dir;

  void validate() const;
};

struct LabeledPool {
  PointPool pool;
  std::vector<std::uint8_t> y_h;
  Metric metric = Metric::Euclidean;
};

struct CsvTable {
  Features features;
  std::vector<std::uint8_t> labels;
};

// Header row, feature columns, then the label column. Features are stored as
// binary when `binary` is set (every value must be 0 or 1), dense otherwise.
CsvTable read_csv(const std::filesystem::path& path, std::string_view label_column,
                  bool binary);

// Writes dense or binary features plus labels in the format read_csv reads.
void write_csv(const std::filesystem::path& path, const Features& features,
               const std::vector<std::uint8_t>& labels);

// Exact K nearest neighbors (K capped at n - 1), ties to the lower id.
std::vector<std::vector<Neighbor>> build_neighbor_graph(const Features& features, std::size_t k,
                                                        Metric metric,
                                                        Weighting weighting = Weighting::Uniform,
                                                        std::size_t workers = 1);

// Features and labels of a Gaussian-cluster pool.
CsvTable synth_table(const SyntheticParams& params);

LabeledPool synth_pool(const SyntheticParams& params, std::size_t k = 50,
                       Weighting weighting = Weighting::Uniform);

LabeledPool load_pool(const DatasetSpec& spec, std::size_t workers = 1);

// Binary graph cache: magic, version, feature hash, n, K, metric, weighting,
// neighbor lists, checksum.
void cache_graph(const PointPool& pool, std::size_t k, Metric metric, Weighting weighting,
                 const std::filesystem::path& path);

// Rejects corrupt files and caches built for other features or parameters.
PointPool load_cached(const std::filesystem::path& path, Features features, std::size_t k,
                      Metric metric, Weighting weighting);

}  // namespace mfas

#endif  // MFAS_DATA_HPP_
