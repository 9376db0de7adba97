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

#include "mfas/point_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace mfas {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

template <typename T>
void fnv_value(std::uint64_t& h, T v) {
  fnv_bytes(h, &v, sizeof(v));
}

}  // namespace

Fidelity fidelity_from_string(std::string_view s) {
  if (s == "H" || s == "h") return Fidelity::H;
  if (s == "L" || s == "l") return Fidelity::L;
  throw InvalidArgument("unknown fidelity '" + std::string(s) + "'");
}

std::size_t feature_count(const Features& features) {
  return std::visit([](const auto& f) { return f.size(); }, features);
}

std::uint64_t feature_hash(const Features& features) {
  std::uint64_t h = kFnvOffset;
  if (const auto* dense = std::get_if<DenseFeatures>(&features)) {
    fnv_value<std::uint8_t>(h, 0);
    fnv_value<std::uint64_t>(h, dense->dims);
    fnv_value<std::uint64_t>(h, dense->values.size());
    for (double v : dense->values) {
      // Canonicalize -0.0 so equal-valued files hash equally.
      double c = v == 0.0 ? 0.0 : v;
      fnv_value(h, c);
    }
  } else {
    const auto& bin = std::get<BinaryFeatures>(features);
    fnv_value<std::uint8_t>(h, 1);
    fnv_value<std::uint64_t>(h, bin.dims);
    fnv_value<std::uint64_t>(h, bin.offsets.size());
    fnv_bytes(h, bin.offsets.data(), bin.offsets.size() * sizeof(std::uint32_t));
    fnv_bytes(h, bin.indices.data(), bin.indices.size() * sizeof(std::uint32_t));
  }
  return h;
}

PointPool::PointPool(Features features, std::vector<std::vector<Neighbor>> knn)
    : n_(knn.size()), features_(std::move(features)) {
  if (feature_count(features_) != n_) {
    throw InvalidArgument("feature rows (" + std::to_string(feature_count(features_)) +
                          ") do not match neighbor lists (" + std::to_string(n_) + ")");
  }
  feature_hash_ = mfas::feature_hash(features_);

  std::vector<std::size_t> rdeg(n_, 0);
  knn_offsets_.assign(1, 0);
  knn_offsets_.reserve(n_ + 1);
  max_in_weight_.assign(n_, 1.0);
  std::vector<PointId> seen;
  for (std::size_t x = 0; x < n_; ++x) {
    seen.clear();
    for (const Neighbor& nb : knn[x]) {
      if (nb.id >= n_) {
        throw InvalidArgument("neighbor id " + std::to_string(nb.id) + " of point " +
                              std::to_string(x) + " out of range");
      }
      if (nb.id == x) {
        throw InvalidArgument("self loop at point " + std::to_string(x));
      }
      if (!(nb.weight > 0.0) || !std::isfinite(nb.weight)) {
        throw InvalidArgument("non-positive or non-finite weight at point " +
                              std::to_string(x));
      }
      seen.push_back(nb.id);
      knn_.push_back(nb);
      ++rdeg[nb.id];
      max_in_weight_[x] = std::max(max_in_weight_[x], nb.weight);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw InvalidArgument("duplicate neighbor at point " + std::to_string(x));
    }
    max_deg_ = std::max(max_deg_, knn[x].size());
    knn_offsets_.push_back(knn_.size());
  }

  rknn_offsets_.assign(n_ + 1, 0);
  for (std::size_t x = 0; x < n_; ++x) {
    rknn_offsets_[x + 1] = rknn_offsets_[x] + rdeg[x];
    max_rdeg_ = std::max(max_rdeg_, rdeg[x]);
  }
  rknn_.resize(knn_.size());
  std::vector<std::size_t> cursor(rknn_offsets_.begin(), rknn_offsets_.end() - 1);
  for (std::size_t x = 0; x < n_; ++x) {
    for (const Neighbor& nb : this->knn(static_cast<PointId>(x))) {
      rknn_[cursor[nb.id]++] = Neighbor{static_cast<PointId>(x), nb.weight};
    }
  }
}

void PointPool::check_point(PointId x) const {
  if (x >= n_) {
    throw InvalidArgument("unknown point id " + std::to_string(x) + " (pool size " +
                          std::to_string(n_) + ")");
  }
}

std::vector<std::vector<Neighbor>> PointPool::knn_lists() const {
  std::vector<std::vector<Neighbor>> out(n_);
  for (std::size_t x = 0; x < n_; ++x) {
    auto row = knn(static_cast<PointId>(x));
    out[x].assign(row.begin(), row.end());
  }
  return out;
}

bool operator==(const PointPool& a, const PointPool& b) {
  return a.n_ == b.n_ && a.feature_hash_ == b.feature_hash_ &&
         a.knn_offsets_ == b.knn_offsets_ && a.knn_ == b.knn_ &&
         a.rknn_offsets_ == b.rknn_offsets_ && a.rknn_ == b.rknn_ &&
         a.features_ == b.features_;
}

}  // namespace mfas
