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

#ifndef MFAS_TYPES_HPP_
#define MFAS_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mfas {

using PointId = std::uint32_t;

// H is the exact (slow) oracle, L the noisy (fast) one.
enum class Fidelity : std::uint8_t { H = 0, L = 1 };

constexpr Fidelity other(Fidelity f) {
  return f == Fidelity::H ? Fidelity::L : Fidelity::H;
}

constexpr std::string_view to_string(Fidelity f) {
  return f == Fidelity::H ? "H" : "L";
}

Fidelity fidelity_from_string(std::string_view s);

struct Observation {
  PointId point = 0;
  Fidelity fidelity = Fidelity::H;
  bool label = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// One of the two per-fidelity copies of a point in the k-NN model.
struct CopyRef {
  PointId point = 0;
  Fidelity fidelity = Fidelity::H;

  friend bool operator==(const CopyRef&, const CopyRef&) = default;
  friend auto operator<=>(const CopyRef&, const CopyRef&) = default;
};

// Base class for all library errors; the CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or malformed input supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A contract between library components was broken at runtime
// (duplicate query, stale snapshot token, exhausted pool).
class StateError : public Error {
 public:
  using Error::Error;
};

// File parsing, cache integrity and I/O failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfas

#endif  // MFAS_TYPES_HPP_
