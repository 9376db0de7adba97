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

#include "mfas/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

namespace mfas {

namespace fs = std::filesystem;

std::string_view metric_name(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "jaccard";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "jaccard") return Metric::Jaccard;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::string_view weighting_name(Weighting w) {
  return w == Weighting::Uniform ? "uniform" : "similarity";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "uniform") return Weighting::Uniform;
  if (name == "similarity") return Weighting::Similarity;
  throw InvalidArgument("unknown weighting '" + std::string(name) + "'");
}

void SyntheticParams::validate() const {
  if (n < 2) throw InvalidArgument("synthetic pool needs at least 2 points");
  if (dims < 1) throw InvalidArgument("synthetic pool needs at least one dimension");
  if (clusters < 1 || clusters > n) throw InvalidArgument("cluster count must lie in [1, n]");
  if (positive_clusters < 1 || positive_clusters > clusters) {
    throw InvalidArgument("positive cluster count must lie in [1, clusters]");
  }
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("prevalence must lie in (0, 1)");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw InvalidArgument("spread must be positive");
}

void DatasetSpec::validate() const {
  if (csv.has_value() == synthetic.has_value()) {
    throw InvalidArgument("dataset '" + name + "' needs exactly one of csv or synthetic");
  }
  if (k < 1) throw InvalidArgument("neighbor count must be at least 1");
  if (synthetic) {
    synthetic->validate();
    if (metric && *metric == Metric::Jaccard) {
      throw InvalidArgument("synthetic pools have dense features; use euclidean");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw IoError("row " + std::to_string(row) + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

BinaryFeatures to_binary(const DenseFeatures& dense) {
  BinaryFeatures out;
  out.dims = dense.dims;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const auto row = dense.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (row[d] != 0.0 && row[d] != 1.0) {
        throw InvalidArgument("row " + std::to_string(i + 2) + ": binary feature is not 0 or 1");
      }
      if (row[d] == 1.0) out.indices.push_back(static_cast<std::uint32_t>(d));
    }
    out.offsets.push_back(static_cast<std::uint32_t>(out.indices.size()));
  }
  return out;
}

bool all_binary(const DenseFeatures& dense) {
  return std::all_of(dense.values.begin(), dense.values.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

std::size_t intersection_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t c = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++c;
      ++i;
      ++j;
    }
  }
  return c;
}

}  // namespace

CsvTable read_csv(const fs::path& path, std::string_view label_column, bool binary) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw IoError(path.string() + ": missing label column '" + std::string(label_column) + "'");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());
  if (header.size() < 2) throw IoError(path.string() + ": no feature columns");

  DenseFeatures dense;
  dense.dims = header.size() - 1;
  CsvTable table;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " columns, expected " +
                    std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) {
        if (cells[c] == "1") {
          table.labels.push_back(1);
        } else if (cells[c] == "0") {
          table.labels.push_back(0);
        } else {
          throw IoError(path.string() + ": row " + std::to_string(row) + ": label '" +
                        std::string(cells[c]) + "' is not 0 or 1");
        }
      } else {
        dense.values.push_back(parse_double(cells[c], row));
      }
    }
  }
  if (table.labels.empty()) throw IoError(path.string() + ": no data rows");
  if (binary) {
    table.features = to_binary(dense);
  } else {
    table.features = std::move(dense);
  }
  return table;
}

void write_csv(const fs::path& path, const Features& features,
               const std::vector<std::uint8_t>& labels) {
  if (feature_count(features) != labels.size()) {
    throw InvalidArgument("feature and label counts differ");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  const std::size_t dims = std::visit([](const auto& f) { return f.dims; }, features);
  for (std::size_t d = 0; d < dims; ++d) out << 'f' << d << ',';
  out << "label\n";
  std::vector<double> row(dims);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (const auto* dense = std::get_if<DenseFeatures>(&features)) {
      const auto r = dense->row(i);
      row.assign(r.begin(), r.end());
    } else {
      std::fill(row.begin(), row.end(), 0.0);
      for (auto idx : std::get<BinaryFeatures>(features).row(i)) row[idx] = 1.0;
    }
    for (double v : row) out << v << ',';
    out << static_cast<int>(labels[i]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::vector<Neighbor>> build_neighbor_graph(const Features& features, std::size_t k,
                                                        Metric metric, Weighting weighting,
                                                        std::size_t workers) {
  const std::size_t n = feature_count(features);
  if (k < 1) throw InvalidArgument("neighbor count must be at least 1");
  const auto* dense = std::get_if<DenseFeatures>(&features);
  const auto* bin = std::get_if<BinaryFeatures>(&features);
  if (metric == Metric::Jaccard && !bin) {
    throw InvalidArgument("jaccard metric needs binary features");
  }
  const std::size_t kk = n == 0 ? 0 : std::min(k, n - 1);

  // Euclidean ranks by squared distance; the weight uses the distance.
  auto distance = [&](std::size_t i, std::size_t j) -> double {
    if (dense) {
      const auto a = dense->row(i);
      const auto b = dense->row(j);
      double s = 0.0;
      for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
      }
      return s;
    }
    const auto a = bin->row(i);
    const auto b = bin->row(j);
    const std::size_t inter = intersection_size(a, b);
    if (metric == Metric::Euclidean) return static_cast<double>(a.size() + b.size() - 2 * inter);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
  };
  auto weight = [&](double d) {
    if (weighting == Weighting::Uniform) return 1.0;
    if (metric == Metric::Euclidean) return 1.0 / (1.0 + std::sqrt(d));
    return std::max(1.0 - d, 1e-6);
  };

  std::vector<std::vector<Neighbor>> knn(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    std::vector<std::pair<double, PointId>> cand;
    for (std::size_t i = begin; i < n; i += stride) {
      cand.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand.emplace_back(distance(i, j), static_cast<PointId>(j));
      }
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
      knn[i].reserve(kk);
      for (std::size_t r = 0; r < kk; ++r) knn[i].push_back(Neighbor{cand[r].second, weight(cand[r].first)});
    }
  };
  const std::size_t used = std::max<std::size_t>(1, std::min(workers, n));
  if (used == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < used; ++w) threads.emplace_back(work, w, used);
  }
  return knn;
}

CsvTable synth_table(const SyntheticParams& p) {
  p.validate();
  const std::size_t positives =
      static_cast<std::size_t>(std::floor(p.r * static_cast<double>(p.n) + 0.5));
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, p.spread);

  std::vector<double> centers(p.clusters * p.dims);
  for (double& c : centers) c = unit(rng);

  // Cluster of each point, sizes as equal as possible.
  std::vector<std::size_t> cluster(p.n);
  for (std::size_t i = 0; i < p.n; ++i) cluster[i] = i % p.clusters;
  std::vector<PointId> eligible;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (cluster[i] < p.positive_clusters) eligible.push_back(static_cast<PointId>(i));
  }
  if (positives < 1 || positives > eligible.size()) {
    throw InvalidArgument("prevalence infeasible for the designated positive clusters");
  }
  std::vector<std::uint8_t> label(p.n, 0);
  for (std::size_t i = 0; i < positives; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng)]);
    label[eligible[i]] = 1;
  }

  // Random row order so ids carry no cluster information.
  std::vector<std::size_t> order(p.n);
  for (std::size_t i = 0; i < p.n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  DenseFeatures dense;
  dense.dims = p.dims;
  dense.values.reserve(p.n * p.dims);
  CsvTable table;
  table.labels.reserve(p.n);
  for (std::size_t row = 0; row < p.n; ++row) {
    const std::size_t i = order[row];
    for (std::size_t d = 0; d < p.dims; ++d) {
      dense.values.push_back(centers[cluster[i] * p.dims + d] + noise(rng));
    }
    table.labels.push_back(label[i]);
  }
  table.features = std::move(dense);
  return table;
}

LabeledPool synth_pool(const SyntheticParams& params, std::size_t k, Weighting weighting) {
  CsvTable table = synth_table(params);
  auto knn = build_neighbor_graph(table.features, k, Metric::Euclidean, weighting);
  return LabeledPool{PointPool(std::move(table.features), std::move(knn)), std::move(table.labels),
                     Metric::Euclidean};
}

namespace {

constexpr char kMagic[8] = {'M', 'F', 'A', 'S', 'K', 'N', 'N', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t fnv1a(const std::string& bytes, std::size_t len) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(bytes[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::size_t end, const fs::path& path)
      : buf_(buf), end_(end), path_(path) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > end_) throw IoError(path_.string() + ": truncated graph cache");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
  const fs::path& path_;
};

}  // namespace

void cache_graph(const PointPool& pool, std::size_t k, Metric metric, Weighting weighting,
                 const fs::path& path) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, kCacheVersion);
  put<std::uint64_t>(buf, pool.feature_hash());
  put<std::uint64_t>(buf, pool.size());
  put<std::uint64_t>(buf, k);
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(metric));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(weighting));
  for (std::size_t x = 0; x < pool.size(); ++x) {
    const auto nbrs = pool.knn(static_cast<PointId>(x));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(nbrs.size()));
    for (const Neighbor& nb : nbrs) {
      put<std::uint32_t>(buf, nb.id);
      put<double>(buf, nb.weight);
    }
  }
  put<std::uint64_t>(buf, fnv1a(buf, buf.size()));
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

PointPool load_cached(const fs::path& path, Features features, std::size_t k, Metric metric,
                      Weighting weighting) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + sizeof(std::uint64_t) ||
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + ": not a graph cache");
  }
  const std::size_t body = buf.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, buf.data() + body, sizeof(stored));
  if (stored != fnv1a(buf, body)) throw IoError(path.string() + ": corrupt or truncated graph cache");

  Reader r(buf, body, path);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.get<char>();
  if (r.get<std::uint32_t>() != kCacheVersion) throw IoError(path.string() + ": unsupported cache version");
  if (r.get<std::uint64_t>() != feature_hash(features)) {
    throw IoError(path.string() + ": cache was built for different features");
  }
  const auto n = r.get<std::uint64_t>();
  if (n != feature_count(features)) throw IoError(path.string() + ": point count mismatch");
  if (r.get<std::uint64_t>() != k) throw IoError(path.string() + ": neighbor count mismatch");
  if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(metric)) {
    throw IoError(path.string() + ": metric mismatch");
  }
  if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(weighting)) {
    throw IoError(path.string() + ": weighting mismatch");
  }
  std::vector<std::vector<Neighbor>> knn(n);
  for (auto& list : knn) {
    const auto count = r.get<std::uint32_t>();
    if (count > n) throw IoError(path.string() + ": corrupt neighbor list");
    list.reserve(count);
    for (std::uint32_t j = 0; j < count; ++j) {
      const auto id = r.get<std::uint32_t>();
      const auto w = r.get<double>();
      list.push_back(Neighbor{id, w});
    }
  }
  if (!r.done()) throw IoError(path.string() + ": trailing bytes in graph cache");
  try {
    return PointPool(std::move(features), std::move(knn));
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": invalid graph: " + e.what());
  }
}

LabeledPool load_pool(const DatasetSpec& spec, std::size_t workers) {
  spec.validate();
  CsvTable table;
  Metric metric = Metric::Euclidean;
  if (spec.synthetic) {
    table = synth_table(*spec.synthetic);
  } else {
    const bool want_binary = spec.metric && *spec.metric == Metric::Jaccard;
    table = read_csv(*spec.csv, spec.label_column, want_binary);
    if (want_binary) {
      metric = Metric::Jaccard;
    } else if (spec.metric) {
      metric = *spec.metric;
    } else if (all_binary(std::get<DenseFeatures>(table.features))) {
      table.features = to_binary(std::get<DenseFeatures>(table.features));
      metric = Metric::Jaccard;
    }
  }
  const std::size_t n = feature_count(table.features);
  const std::size_t k = std::min(spec.k, n == 0 ? std::size_t{0} : n - 1);

  if (spec.cache_dir) {
    std::ostringstream name;
    name << spec.name << '-' << std::hex << feature_hash(table.features) << std::dec << "-k" << k
         << '-' << metric_name(metric) << '-' << weighting_name(spec.weighting) << ".knn";
    const fs::path path = *spec.cache_dir / name.str();
    if (fs::exists(path)) {
      try {
        PointPool pool = load_cached(path, table.features, k, metric, spec.weighting);
        return LabeledPool{std::move(pool), std::move(table.labels), metric};
      } catch (const IoError&) {
        // Stale or corrupt cache: rebuild below.
      }
    }
    auto knn = build_neighbor_graph(table.features, k, metric, spec.weighting, workers);
    PointPool pool(std::move(table.features), std::move(knn));
    cache_graph(pool, k, metric, spec.weighting, path);
    return LabeledPool{std::move(pool), std::move(table.labels), metric};
  }
  auto knn = build_neighbor_graph(table.features, k, metric, spec.weighting, workers);
  return LabeledPool{PointPool(std::move(table.features), std::move(knn)),
                     std::move(table.labels), metric};
}

}  // namespace mfas
