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

#include "mfas/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "mfas/rng.hpp"
#include "mfas/trace.hpp"

namespace mfas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                    c == '_' || c == '=';
    if (!ok) c = '_';
  }
  return out;
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

DatasetSpec dataset_from_json(const json& d) {
  DatasetSpec spec;
  spec.name = get_or<std::string>(d, "name", spec.name);
  if (d.contains("csv")) spec.csv = fs::path(d.at("csv").get<std::string>());
  if (d.contains("synthetic")) {
    const json& s = d.at("synthetic");
    SyntheticParams p;
    p.n = get_or<std::size_t>(s, "n", p.n);
    p.dims = get_or<std::size_t>(s, "dims", p.dims);
    p.clusters = get_or<std::size_t>(s, "clusters", p.clusters);
    p.positive_clusters = get_or<std::size_t>(s, "positive_clusters", p.positive_clusters);
    p.r = get_or<double>(s, "r", p.r);
    p.spread = get_or<double>(s, "spread", p.spread);
    p.seed = get_or<std::uint64_t>(s, "seed", p.seed);
    spec.synthetic = p;
  }
  spec.k = get_or<std::size_t>(d, "k", spec.k);
  if (d.contains("metric")) spec.metric = parse_metric(d.at("metric").get<std::string>());
  if (d.contains("weighting")) {
    spec.weighting = parse_weighting(d.at("weighting").get<std::string>());
  }
  spec.label_column = get_or<std::string>(d, "label_column", spec.label_column);
  if (d.contains("cache_dir")) spec.cache_dir = fs::path(d.at("cache_dir").get<std::string>());
  return spec;
}

PolicyKind policy_from_json(const json& p) {
  PolicyKind kind;
  if (p.is_string()) {
    kind.type = parse_policy(p.get<std::string>());
  } else {
    kind.type = parse_policy(p.at("name").get<std::string>());
    kind.beta_h = get_or<double>(p, "beta_h", kind.beta_h);
    kind.beta_l = get_or<double>(p, "beta_l", kind.beta_l);
  }
  return kind;
}

}  // namespace

void ExperimentMatrix::validate() const {
  if (datasets.empty()) throw InvalidArgument("matrix needs at least one dataset");
  if (policies.empty()) throw InvalidArgument("matrix needs at least one policy");
  if (thetas.empty()) throw InvalidArgument("matrix needs at least one theta");
  if (ks.empty()) throw InvalidArgument("matrix needs at least one k");
  if (seeds.empty()) throw InvalidArgument("matrix needs at least one seed");
  if (t < 1) throw InvalidArgument("t must be at least 1");
  for (int k : ks) {
    if (k < 0) throw InvalidArgument("k must be nonnegative");
  }
  for (double th : thetas) {
    if (!(th >= 0.0 && th < 1.0)) throw InvalidArgument("theta must lie in [0, 1)");
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw InvalidArgument("seeds must be distinct");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    d.validate();
    if (!names.insert(d.name).second) throw InvalidArgument("duplicate dataset name " + d.name);
  }
  for (const auto& p : policies) p.validate();
  if (q_grid.empty()) throw InvalidArgument("q grid must be nonempty");
  for (double q : q_grid) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("q grid values must lie in (0, 1)");
  }
  if (!(model.gamma > 0.0 && model.gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (jobs == 0 || wave_size == 0 || workers == 0) {
    throw InvalidArgument("jobs, wave_size and workers must be positive");
  }
}

ExperimentMatrix matrix_from_json(const json& doc) {
  ExperimentMatrix m;
  try {
    if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
    for (const auto& d : doc.at("datasets")) m.datasets.push_back(dataset_from_json(d));
    for (const auto& p : doc.at("policies")) m.policies.push_back(policy_from_json(p));
    m.thetas = get_or<std::vector<double>>(doc, "thetas", m.thetas);
    m.ks = get_or<std::vector<int>>(doc, "ks", m.ks);
    m.t = get_or<int>(doc, "t", m.t);
    if (doc.contains("seeds")) {
      m.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      const auto count = get_or<std::uint64_t>(doc, "seed_count", 5);
      for (std::uint64_t s = 0; s < count; ++s) m.seeds.push_back(s);
    }
    if (doc.contains("caps")) {
      const json& c = doc.at("caps");
      auto cap = [&](const char* key) {
        return !c.contains(key) || c.at(key).is_null() ? kUnlimited : c.at(key).get<std::size_t>();
      };
      m.caps = SearchCaps{cap("u"), cap("s")};
    }
    m.model.gamma = get_or<double>(doc, "gamma", m.model.gamma);
    m.q_grid = get_or<std::vector<double>>(doc, "q_grid", m.q_grid);
    m.output_dir = get_or<std::string>(doc, "output_dir", m.output_dir.string());
    m.jobs = get_or<std::size_t>(doc, "jobs", m.jobs);
    m.wave_size = get_or<std::size_t>(doc, "wave_size", m.wave_size);
    m.workers = get_or<std::size_t>(doc, "workers", m.workers);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config: ") + e.what());
  }
  m.validate();
  return m;
}

std::vector<TraceJob> plan_matrix(const ExperimentMatrix& m) {
  std::vector<TraceJob> jobs;
  for (std::size_t d = 0; d < m.datasets.size(); ++d) {
    for (double theta : m.thetas) {
      for (int k : m.ks) {
        for (const PolicyKind& p : m.policies) {
          for (std::uint64_t seed : m.seeds) {
            TraceJob job{d, p, theta, k, seed, {}};
            const std::string file = std::string(policy_name(p.type)) + "_theta" +
                                     format_number(theta) + "_k" + std::to_string(k) + "_t" +
                                     std::to_string(m.t) + "_seed" + std::to_string(seed) +
                                     ".jsonl";
            job.path = m.output_dir / sanitize(m.datasets[d].name) / file;
            jobs.push_back(std::move(job));
          }
        }
      }
    }
  }
  return jobs;
}

GroundTruth cell_truth(const LabeledPool& data, const std::string& dataset, double theta,
                       std::uint64_t seed) {
  std::mt19937_64 rng(
      derive_seed(seed, {tag("truth"), tag(dataset), std::bit_cast<std::uint64_t>(theta)}));
  return make_ground_truth(data.y_h, theta, rng);
}

RunConfig job_config(const ExperimentMatrix& m, const TraceJob& job) {
  RunConfig c;
  c.policy = job.policy;
  c.t = m.t;
  c.k = job.k;
  c.seed = job.seed;
  c.caps = m.caps;
  c.model = m.model;
  c.q_grid = m.q_grid;
  c.wave_size = m.wave_size;
  c.workers = m.workers;
  c.dataset = m.datasets[job.dataset].name;
  c.theta = job.theta;
  return c;
}

MatrixReport run_matrix(const ExperimentMatrix& m, std::ostream* log) {
  m.validate();
  const auto jobs = plan_matrix(m);
  MatrixReport report;
  report.planned = jobs.size();
  std::vector<const TraceJob*> todo;
  for (const auto& job : jobs) {
    report.traces.push_back(job.path);
    switch (trace_status(job.path)) {
      case TraceStatus::Complete:
        ++report.skipped;
        break;
      case TraceStatus::Partial:
        ++report.rerun_partial;
        todo.push_back(&job);
        break;
      case TraceStatus::Missing:
        todo.push_back(&job);
        break;
    }
  }
  if (todo.empty()) return report;

  std::vector<std::optional<LabeledPool>> pools(m.datasets.size());
  for (const TraceJob* job : todo) {
    if (!pools[job->dataset]) pools[job->dataset] = load_pool(m.datasets[job->dataset], m.workers);
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      const TraceJob& job = *todo[i];
      try {
        const LabeledPool& data = *pools[job.dataset];
        const GroundTruth truth =
            cell_truth(data, m.datasets[job.dataset].name, job.theta, job.seed);
        const RunTrace trace = run_experiment(job_config(m, job), data.pool, truth);
        write_trace(job.path, trace);
        std::lock_guard lock(mu);
        ++report.ran;
        if (log) {
          *log << "[" << report.ran << "/" << todo.size() << "] " << job.path.string()
               << " utility=" << trace.utility << std::endl;
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t threads = std::min(m.jobs, todo.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

std::string CellId::label() const {
  return dataset + "/" + policy + "/theta=" + format_number(theta) + "/k=" + std::to_string(k) +
         "/t=" + std::to_string(t);
}

CellId cell_of(const RunConfig& c) {
  return CellId{c.dataset, std::string(policy_name(c.policy.type)), c.theta, c.k, c.t};
}

namespace {

Series average(const std::string& name, const std::vector<std::vector<double>>& rows) {
  Series s;
  s.name = name;
  std::size_t len = 0;
  for (const auto& r : rows) len = std::max(len, r.size());
  std::vector<double> column;
  for (std::size_t i = 0; i < len; ++i) {
    column.clear();
    for (const auto& r : rows) {
      if (i < r.size()) column.push_back(r[i]);
    }
    const MeanSe ms = mean_se(column);
    s.value.push_back(ms.mean);
    s.se.push_back(ms.se);
    s.count.push_back(ms.n);
  }
  return s;
}

std::vector<double> h_utilities(const RunTrace& t) {
  std::vector<double> out;
  for (const auto& s : t.steps) {
    if (s.fidelity == Fidelity::H) out.push_back(static_cast<double>(s.utility));
  }
  return out;
}

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += v[i];
  return sum / static_cast<double>(end - begin);
}

}  // namespace

Series difference_series(const std::vector<const RunTrace*>& a,
                         const std::vector<const RunTrace*>& b, const std::string& name) {
  std::map<std::uint64_t, const RunTrace*> by_seed;
  for (const RunTrace* t : b) by_seed[t->config.seed] = t;
  std::vector<std::vector<double>> rows;
  for (const RunTrace* ta : a) {
    const auto it = by_seed.find(ta->config.seed);
    if (it == by_seed.end()) continue;
    const RunTrace* tb = it->second;
    std::vector<double> diff;
    if (ta->steps.size() == tb->steps.size()) {
      for (std::size_t i = 0; i < ta->steps.size(); ++i) {
        diff.push_back(static_cast<double>(ta->steps[i].utility) -
                       static_cast<double>(tb->steps[i].utility));
      }
    } else {
      const auto ua = h_utilities(*ta);
      const auto ub = h_utilities(*tb);
      for (std::size_t i = 0; i < std::min(ua.size(), ub.size()); ++i) diff.push_back(ua[i] - ub[i]);
    }
    rows.push_back(std::move(diff));
  }
  return average(name, rows);
}

TrendRow decile_trend(const CellId& cell, const std::vector<const RunTrace*>& traces) {
  TrendRow row;
  row.cell = cell;
  std::vector<double> first;
  std::vector<double> last;
  for (const RunTrace* t : traces) {
    std::vector<double> post;
    for (const auto& s : t->steps) {
      if (s.fidelity == Fidelity::H) post.push_back(s.posterior);
    }
    if (post.empty()) continue;
    const std::size_t d = std::max<std::size_t>(1, post.size() / 10);
    first.push_back(mean_of(post, 0, d));
    last.push_back(mean_of(post, post.size() - d, post.size()));
  }
  row.seeds = first.size();
  if (!first.empty()) {
    row.first_decile = mean_se(first).mean;
    row.last_decile = mean_se(last).mean;
  }
  if (first.size() >= 2) row.test = paired_t_test(last, first);
  return row;
}

PruneRow prune_summary(const CellId& cell, const std::vector<const RunTrace*>& traces) {
  PruneRow row;
  row.cell = cell;
  std::size_t covered = 0;
  double cand = 0.0;
  double total = 0.0;
  double partial = 0.0;
  double cand_cov = 0.0;
  double pruned_cov = 0.0;
  for (const RunTrace* t : traces) {
    if (!t->config.policy.is_nonmyopic()) continue;
    for (const auto& s : t->steps) {
      const auto& c = s.counters;
      ++row.selections;
      cand += static_cast<double>(c.candidates);
      total += static_cast<double>(c.total_pruned);
      partial += static_cast<double>(c.partial_pruned);
      if (c.covered) {
        ++covered;
        cand_cov += static_cast<double>(c.candidates);
        pruned_cov += static_cast<double>(c.total_pruned + c.partial_pruned);
      }
    }
  }
  if (row.selections > 0) {
    row.coverage_rate = static_cast<double>(covered) / static_cast<double>(row.selections);
  }
  if (cand > 0) {
    row.total_pct = 100.0 * total / cand;
    row.partial_pct = 100.0 * partial / cand;
  }
  if (cand_cov > 0) row.combined_pct_covered = 100.0 * pruned_cov / cand_cov;
  return row;
}

Summary summarize(const std::vector<RunTrace>& traces) {
  std::map<CellId, std::vector<const RunTrace*>> cells;
  for (const auto& t : traces) cells[cell_of(t.config)].push_back(&t);

  Summary out;
  for (auto& [cell, list] : cells) {
    std::sort(list.begin(), list.end(), [](const RunTrace* a, const RunTrace* b) {
      return a->config.seed < b->config.seed;
    });
    json reference = config_to_json(list.front()->config);
    reference.erase("seed");
    for (std::size_t i = 0; i < list.size(); ++i) {
      json c = config_to_json(list[i]->config);
      c.erase("seed");
      if (c != reference) throw InvalidArgument("mixed configurations in cell " + cell.label());
      if (i > 0 && list[i]->config.seed == list[i - 1]->config.seed) {
        throw InvalidArgument("duplicate seed in cell " + cell.label());
      }
    }

    std::vector<double> finals;
    std::vector<std::vector<double>> util_rows;
    std::vector<std::vector<double>> post_rows;
    for (const RunTrace* t : list) {
      finals.push_back(static_cast<double>(t->utility));
      std::vector<double> u;
      std::vector<double> p;
      for (const auto& s : t->steps) {
        u.push_back(static_cast<double>(s.utility));
        if (s.fidelity == Fidelity::H) p.push_back(s.posterior);
      }
      util_rows.push_back(std::move(u));
      post_rows.push_back(std::move(p));
    }
    const MeanSe ms = mean_se(finals);
    out.rows.push_back(SummaryRow{cell, ms.mean, ms.se, ms.n});
    out.utility.push_back(average("utility/" + cell.label(), util_rows));
    out.posterior.push_back(average("posterior/" + cell.label(), post_rows));
    if (list.front()->config.policy.is_nonmyopic()) out.pruning.push_back(prune_summary(cell, list));
    out.trends.push_back(decile_trend(cell, list));
  }

  // Pairwise comparisons within (dataset, theta, k, t).
  for (auto ia = cells.begin(); ia != cells.end(); ++ia) {
    for (auto ib = std::next(ia); ib != cells.end(); ++ib) {
      const CellId& a = ia->first;
      const CellId& b = ib->first;
      if (a.dataset != b.dataset || a.theta != b.theta || a.k != b.k || a.t != b.t) continue;
      const std::string name = "difference/" + a.dataset + "/theta=" + format_number(a.theta) +
                               "/k=" + std::to_string(a.k) + "/t=" + std::to_string(a.t) + "/" +
                               a.policy + "-minus-" + b.policy;
      out.difference.push_back(difference_series(ia->second, ib->second, name));

      std::map<std::uint64_t, double> ub;
      for (const RunTrace* t : ib->second) ub[t->config.seed] = static_cast<double>(t->utility);
      std::vector<double> xa;
      std::vector<double> xb;
      for (const RunTrace* t : ia->second) {
        const auto it = ub.find(t->config.seed);
        if (it == ub.end()) continue;
        xa.push_back(static_cast<double>(t->utility));
        xb.push_back(it->second);
      }
      PairTest test{a, b, xa.size(), {}};
      if (xa.size() >= 2) test.test = paired_t_test(xa, xb);
      out.tests.push_back(test);
    }
  }
  return out;
}

std::vector<RunTrace> load_traces(const fs::path& root, std::vector<fs::path>* partial) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else if (fs::is_directory(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
  } else {
    throw IoError("no such trace file or directory: " + root.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> out;
  for (const auto& f : files) {
    if (trace_status(f) != TraceStatus::Complete) {
      if (partial) partial->push_back(f);
      continue;
    }
    out.push_back(read_trace(f));
  }
  return out;
}

namespace {

json cell_json(const CellId& c) {
  return json{{"dataset", c.dataset}, {"policy", c.policy}, {"theta", c.theta},
              {"k", c.k},             {"t", c.t}};
}

json test_json(const TTestResult& r) {
  return json{{"t", r.t}, {"p", r.p}, {"df", r.df}, {"mean_diff", r.mean_diff}};
}

void write_series(const Series& s, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17) << "series,index,value,se,count\n";
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    out << s.name << ',' << i + 1 << ',' << s.value[i] << ',' << s.se[i] << ',' << s.count[i]
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17) << header << '\n';
  return out;
}

}  // namespace

json summary_to_json(const Summary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    json j = cell_json(r.cell);
    j["mean"] = r.mean;
    j["se"] = r.se;
    j["repeats"] = r.repeats;
    rows.push_back(j);
  }
  json pruning = json::array();
  for (const auto& p : s.pruning) {
    json j = cell_json(p.cell);
    j["selections"] = p.selections;
    j["coverage_rate"] = p.coverage_rate;
    j["total_pct"] = p.total_pct;
    j["partial_pct"] = p.partial_pct;
    j["combined_pct_covered"] = p.combined_pct_covered;
    pruning.push_back(j);
  }
  json tests = json::array();
  for (const auto& t : s.tests) {
    tests.push_back(json{{"a", cell_json(t.a)},
                         {"b", cell_json(t.b)},
                         {"pairs", t.pairs},
                         {"test", test_json(t.test)}});
  }
  json trends = json::array();
  for (const auto& t : s.trends) {
    json j = cell_json(t.cell);
    j["seeds"] = t.seeds;
    j["first_decile"] = t.first_decile;
    j["last_decile"] = t.last_decile;
    j["test"] = test_json(t.test);
    trends.push_back(j);
  }
  auto names = [](const std::vector<Series>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.name);
    return a;
  };
  return json{{"rows", rows},
              {"pruning", pruning},
              {"tests", tests},
              {"trends", trends},
              {"series",
               {{"utility", names(s.utility)},
                {"posterior", names(s.posterior)},
                {"difference", names(s.difference)}}}};
}

void emit_series(const Summary& s, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw IoError("cannot write " + (dir / "summary.json").string());
    out << summary_to_json(s).dump(2) << '\n';
  }
  {
    auto out = open_csv(dir / "summary.csv", "dataset,policy,theta,k,t,mean,se,repeats");
    for (const auto& r : s.rows) {
      out << r.cell.dataset << ',' << r.cell.policy << ',' << r.cell.theta << ',' << r.cell.k
          << ',' << r.cell.t << ',' << r.mean << ',' << r.se << ',' << r.repeats << '\n';
    }
  }
  {
    auto out = open_csv(dir / "pruning.csv",
                        "dataset,policy,theta,k,t,selections,coverage_rate,total_pct,"
                        "partial_pct,combined_pct_covered");
    for (const auto& p : s.pruning) {
      out << p.cell.dataset << ',' << p.cell.policy << ',' << p.cell.theta << ',' << p.cell.k
          << ',' << p.cell.t << ',' << p.selections << ',' << p.coverage_rate << ','
          << p.total_pct << ',' << p.partial_pct << ',' << p.combined_pct_covered << '\n';
    }
  }
  {
    auto out = open_csv(dir / "tests.csv",
                        "dataset,theta,k,t,policy_a,policy_b,pairs,mean_diff,t_stat,p_value");
    for (const auto& t : s.tests) {
      out << t.a.dataset << ',' << t.a.theta << ',' << t.a.k << ',' << t.a.t << ','
          << t.a.policy << ',' << t.b.policy << ',' << t.pairs << ',' << t.test.mean_diff << ','
          << t.test.t << ',' << t.test.p << '\n';
    }
  }
  {
    auto out = open_csv(dir / "trends.csv",
                        "dataset,policy,theta,k,t,seeds,first_decile,last_decile,t_stat,p_value");
    for (const auto& t : s.trends) {
      out << t.cell.dataset << ',' << t.cell.policy << ',' << t.cell.theta << ',' << t.cell.k
          << ',' << t.cell.t << ',' << t.seeds << ',' << t.first_decile << ',' << t.last_decile
          << ',' << t.test.t << ',' << t.test.p << '\n';
    }
  }
  for (const auto* group : {&s.utility, &s.posterior, &s.difference}) {
    for (const auto& series : *group) {
      write_series(series, dir / "series" / (sanitize(series.name) + ".csv"));
    }
  }
}

Series read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "series,index,value,se,count") {
    throw IoError(path.string() + ": not a series file");
  }
  Series s;
  s.name = path.stem().string();
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    // The name may not contain commas; the last four fields are numeric.
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw IoError(path.string() + ": bad row " + std::to_string(row));
    auto num = [&](const std::string& c) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || p != c.data() + c.size()) {
        throw IoError(path.string() + ": bad number '" + c + "' in row " + std::to_string(row));
      }
      return v;
    };
    s.name = cells[0];
    if (static_cast<std::size_t>(num(cells[1])) != s.value.size() + 1) {
      throw IoError(path.string() + ": indices out of order");
    }
    s.value.push_back(num(cells[2]));
    s.se.push_back(num(cells[3]));
    s.count.push_back(static_cast<std::size_t>(num(cells[4])));
  }
  return s;
}

}  // namespace mfas
