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

#ifndef MFAS_POINT_POOL_HPP_
#define MFAS_POINT_POOL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mfas/types.hpp"

namespace mfas {

// Row-major dense real features.
struct DenseFeatures {
  std::size_t dims = 0;
  std::vector<double> values;

  std::size_t size() const { return dims == 0 ? 0 : values.size() / dims; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dims, dims};
  }
  friend bool operator==(const DenseFeatures&, const DenseFeatures&) = default;
};

// Sparse binary features (e.g. chemical fingerprints) in CSR form: the set
// bits of row i are indices[offsets[i] .. offsets[i+1]), sorted ascending.
struct BinaryFeatures {
  std::size_t dims = 0;
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const std::uint32_t> row(std::size_t i) const {
    return {indices.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  friend bool operator==(const BinaryFeatures&, const BinaryFeatures&) = default;
};

using Features = std::variant<DenseFeatures, BinaryFeatures>;

std::size_t feature_count(const Features& features);

// 64-bit FNV-1a digest over the feature representation; identifies the
// feature set a cached neighbor graph was built from.
std::uint64_t feature_hash(const Features& features);

struct Neighbor {
  PointId id = 0;
  double weight = 1.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Immutable point set with its nearest-neighbor graph.
//
// knn(x) is the ordered neighbor list of x. rknn(x) lists every x' that has x
// in knn(x'); the weight stored there is the weight x' assigned to x.
class PointPool {
 public:
  PointPool() = default;

  // Validates the graph (ids in range, no self loops, no duplicate
  // neighbors, strictly positive finite weights) and builds the reverse
  // adjacency. Throws InvalidArgument on violation.
  PointPool(Features features, std::vector<std::vector<Neighbor>> knn);

  std::size_t size() const { return n_; }
  const Features& features() const { return features_; }
  std::uint64_t feature_hash() const { return feature_hash_; }

  std::span<const Neighbor> knn(PointId x) const {
    return {knn_.data() + knn_offsets_[x], knn_offsets_[x + 1] - knn_offsets_[x]};
  }
  std::span<const Neighbor> rknn(PointId x) const {
    return {rknn_.data() + rknn_offsets_[x],
            rknn_offsets_[x + 1] - rknn_offsets_[x]};
  }

  // Largest weight any single new observation can contribute to a copy of x
  // before damping: the self weight 1 or the largest incoming edge weight.
  double max_incoming_weight(PointId x) const { return max_in_weight_[x]; }

  std::size_t max_reverse_degree() const { return max_rdeg_; }
  std::size_t max_degree() const { return max_deg_; }

  void check_point(PointId x) const;

  // Adjacency lists as nested vectors (for serialization and tests).
  std::vector<std::vector<Neighbor>> knn_lists() const;

  friend bool operator==(const PointPool& a, const PointPool& b);

 private:
  std::size_t n_ = 0;
  Features features_;
  std::uint64_t feature_hash_ = 0;
  std::vector<std::size_t> knn_offsets_{0};
  std::vector<Neighbor> knn_;
  std::vector<std::size_t> rknn_offsets_{0};
  std::vector<Neighbor> rknn_;
  std::vector<double> max_in_weight_;
  std::size_t max_rdeg_ = 0;
  std::size_t max_deg_ = 0;
};

}  // namespace mfas

#endif  // MFAS_POINT_POOL_HPP_
