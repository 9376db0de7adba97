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

// Run traces as line-delimited JSON records:
//   {"type":"config",...}   run configuration and the seed observations
//   {"type":"step",...}     one per iteration
//   {"type":"final",...}    final utility; its absence marks a partial trace
// Selection wall times go to a "<trace>.timing" sidecar so that traces are
// bitwise reproducible.

#ifndef MFAS_TRACE_HPP_
#define MFAS_TRACE_HPP_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mfas/simulate.hpp"

namespace mfas {

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

nlohmann::json step_to_json(const StepRecord& step);
StepRecord step_from_json(const nlohmann::json& j);

// The trace as text, without timings.
std::string serialize_trace(const RunTrace& trace);
RunTrace parse_trace(const std::string& text, const std::string& origin = "trace");

std::filesystem::path timing_path(const std::filesystem::path& trace_path);

// Writes atomically (temporary file, then rename), plus the timing sidecar.
void write_trace(const std::filesystem::path& path, const RunTrace& trace);

enum class TraceStatus { Missing, Partial, Complete };
TraceStatus trace_status(const std::filesystem::path& path);

// Throws IoError for missing, malformed or partial traces.
RunTrace read_trace(const std::filesystem::path& path);

}  // namespace mfas

#endif  // MFAS_TRACE_HPP_
