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

#include "mfas/trace.hpp"

#include <fstream>
#include <sstream>

namespace mfas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json caps_to_json(const SearchCaps& c) {
  auto cap = [](std::size_t v) { return v == kUnlimited ? json(nullptr) : json(v); };
  return json{{"u", cap(c.u)}, {"s", cap(c.s)}};
}

SearchCaps caps_from_json(const json& j) {
  auto cap = [](const json& v) { return v.is_null() ? kUnlimited : v.get<std::size_t>(); };
  return SearchCaps{cap(j.at("u")), cap(j.at("s"))};
}

json counters_to_json(const PruneCounters& c) {
  return json{{"candidates", c.candidates},     {"total", c.total_pruned},
              {"partial", c.partial_pruned},    {"scored", c.fully_scored},
              {"skipped", c.skipped_by_cap},    {"covered", c.covered}};
}

PruneCounters counters_from_json(const json& j) {
  PruneCounters c;
  c.candidates = j.at("candidates").get<std::size_t>();
  c.total_pruned = j.at("total").get<std::size_t>();
  c.partial_pruned = j.at("partial").get<std::size_t>();
  c.fully_scored = j.at("scored").get<std::size_t>();
  c.skipped_by_cap = j.at("skipped").get<std::size_t>();
  c.covered = j.at("covered").get<bool>();
  return c;
}

json observation_to_json(const Observation& o) {
  return json{{"point", o.point}, {"fidelity", std::string(to_string(o.fidelity))},
              {"label", o.label ? 1 : 0}};
}

Observation observation_from_json(const json& j) {
  return Observation{j.at("point").get<PointId>(),
                     fidelity_from_string(j.at("fidelity").get<std::string>()),
                     j.at("label").get<int>() != 0};
}

}  // namespace

json config_to_json(const RunConfig& c) {
  return json{{"policy", std::string(policy_name(c.policy.type))},
              {"beta_h", c.policy.beta_h},
              {"beta_l", c.policy.beta_l},
              {"t", c.t},
              {"k", c.k},
              {"seed", c.seed},
              {"caps", caps_to_json(c.effective_caps())},
              {"gamma", c.model.gamma},
              {"q0", c.model.q},
              {"q_grid", c.q_grid},
              {"wave_size", c.wave_size},
              {"dataset", c.dataset},
              {"theta", c.theta}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.policy.type = parse_policy(j.at("policy").get<std::string>());
  c.policy.beta_h = j.at("beta_h").get<double>();
  c.policy.beta_l = j.at("beta_l").get<double>();
  c.t = j.at("t").get<int>();
  c.k = j.at("k").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.caps = caps_from_json(j.at("caps"));
  c.model.gamma = j.at("gamma").get<double>();
  c.model.q = j.at("q0").get<double>();
  c.q_grid = j.at("q_grid").get<std::vector<double>>();
  c.wave_size = j.at("wave_size").get<std::size_t>();
  c.dataset = j.at("dataset").get<std::string>();
  c.theta = j.at("theta").get<double>();
  return c;
}

json step_to_json(const StepRecord& s) {
  return json{{"type", "step"},
              {"iteration", s.iteration},
              {"fidelity", std::string(to_string(s.fidelity))},
              {"point", s.point},
              {"score", s.score},
              {"posterior", s.posterior},
              {"label", s.label ? 1 : 0},
              {"utility", s.utility},
              {"q", s.q},
              {"pruning", counters_to_json(s.counters)}};
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.iteration = j.at("iteration").get<std::size_t>();
  s.fidelity = fidelity_from_string(j.at("fidelity").get<std::string>());
  s.point = j.at("point").get<PointId>();
  s.score = j.at("score").get<double>();
  s.posterior = j.at("posterior").get<double>();
  s.label = j.at("label").get<int>() != 0;
  s.utility = j.at("utility").get<std::size_t>();
  s.q = j.at("q").get<double>();
  s.counters = counters_from_json(j.at("pruning"));
  return s;
}

std::string serialize_trace(const RunTrace& trace) {
  std::ostringstream out;
  json head{{"type", "config"}, {"config", config_to_json(trace.config)}};
  json initial = json::array();
  for (const auto& o : trace.initial) initial.push_back(observation_to_json(o));
  head["initial"] = initial;
  out << head.dump() << '\n';
  for (const auto& s : trace.steps) out << step_to_json(s).dump() << '\n';
  out << json{{"type", "final"}, {"utility", trace.utility}, {"steps", trace.steps.size()}}.dump()
      << '\n';
  return out.str();
}

RunTrace parse_trace(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  RunTrace trace;
  bool have_config = false;
  bool have_final = false;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (have_final) throw IoError(origin + ": records after the final record");
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "config") {
        if (have_config) throw IoError(origin + ": duplicate config record");
        trace.config = config_from_json(j.at("config"));
        for (const auto& o : j.at("initial")) trace.initial.push_back(observation_from_json(o));
        have_config = true;
      } else if (type == "step") {
        if (!have_config) throw IoError(origin + ": step before config");
        trace.steps.push_back(step_from_json(j));
      } else if (type == "final") {
        trace.utility = j.at("utility").get<std::size_t>();
        if (j.at("steps").get<std::size_t>() != trace.steps.size()) {
          throw IoError(origin + ": step count mismatch");
        }
        have_final = true;
      } else {
        throw IoError(origin + ": unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw IoError(origin + ": line " + std::to_string(lineno) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(origin + ": line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_config || !have_final) throw IoError(origin + ": partial trace");
  return trace;
}

fs::path timing_path(const fs::path& trace_path) { return trace_path.string() + ".timing"; }

void write_trace(const fs::path& path, const RunTrace& trace) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const std::string text = serialize_trace(trace);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  {
    std::ofstream timing(timing_path(path), std::ios::trunc);
    if (!timing) throw IoError("cannot write " + timing_path(path).string());
    timing << "iteration,seconds\n";
    for (const auto& s : trace.steps) timing << s.iteration << ',' << s.seconds << '\n';
  }
  fs::rename(tmp, path);
}

TraceStatus trace_status(const fs::path& path) {
  if (!fs::exists(path)) return TraceStatus::Missing;
  try {
    read_trace(path);
    return TraceStatus::Complete;
  } catch (const IoError&) {
    return TraceStatus::Partial;
  }
}

RunTrace read_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), path.string());
}

}  // namespace mfas
