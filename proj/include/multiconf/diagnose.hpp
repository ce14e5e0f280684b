// Copyright 2026 The multiconf Authors
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

#pragma once

// Conflicts and diagnoses for inconsistent tasks. A background set of
// constraint ids is taken as given; the candidate (foreground) ids are the
// ones that may be blamed or removed. Sets are reported in declaration order.

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multiconf/model.hpp"

namespace multiconf {

enum class Verdict { consistent, inconsistent, unknown };

std::string_view to_string(Verdict v);

struct CheckOptions {
  std::uint64_t node_limit = 2'000'000;
  std::optional<std::chrono::milliseconds> time_limit;
};

struct Conflict {
  std::vector<std::string> ids;
  friend bool operator==(const Conflict&, const Conflict&) = default;
};

struct Diagnosis {
  std::vector<std::string> ids;
  friend bool operator==(const Diagnosis&, const Diagnosis&) = default;
};

// Memoized satisfiability of constraint subsets of one task.
class ConsistencyChecker {
 public:
  explicit ConsistencyChecker(const MultiConfigTask& task, CheckOptions opts = {});

  Verdict check(std::vector<std::string> ids);
  // check() that throws CheckUnknown instead of returning unknown.
  bool consistent(std::vector<std::string> ids);

  const MultiConfigTask& task() const { return task_; }
  std::uint64_t solver_calls() const { return calls_; }
  std::uint64_t cache_hits() const { return hits_; }

 private:
  const MultiConfigTask& task_;
  CheckOptions opts_;
  std::map<std::vector<std::string>, Verdict> cache_;
  std::uint64_t calls_ = 0;
  std::uint64_t hits_ = 0;
};

Verdict check(const std::vector<std::string>& background,
              const std::vector<std::string>& candidate, const MultiConfigTask& task,
              CheckOptions opts = {});

// Minimal subset of `candidates` inconsistent with `background`, or nullopt
// when background plus all candidates is consistent. Throws
// BackgroundInconsistent if the background fails alone.
std::optional<Conflict> min_conflict(const std::vector<std::string>& background,
                                     const std::vector<std::string>& candidates,
                                     const MultiConfigTask& task, CheckOptions opts = {});
std::optional<Conflict> min_conflict(ConsistencyChecker& checker,
                                     const std::vector<std::string>& background,
                                     const std::vector<std::string>& candidates);

// Preferred minimal diagnosis: earlier-declared requirements are kept
// whenever possible. Empty when requirements and base are consistent.
Diagnosis fast_diag(const std::vector<std::string>& requirements,
                    const std::vector<std::string>& base, const MultiConfigTask& task,
                    CheckOptions opts = {});
Diagnosis fast_diag(ConsistencyChecker& checker, const std::vector<std::string>& requirements,
                    const std::vector<std::string>& base);

inline constexpr std::size_t kAllDiagnoses = std::numeric_limits<std::size_t>::max();

struct Exploration {
  std::vector<Conflict> conflicts;    // minimal conflicts met while exploring
  std::vector<Diagnosis> diagnoses;   // by cardinality, then preference
};

// Breadth-first hitting-set search over minimal conflicts. Diagnoses of equal
// size are ordered by the same preference fast_diag uses.
Exploration explore(ConsistencyChecker& checker, const std::vector<std::string>& requirements,
                    const std::vector<std::string>& base, std::size_t max_n = kAllDiagnoses);

std::vector<Diagnosis> diagnoses(const std::vector<std::string>& requirements,
                                 const std::vector<std::string>& base,
                                 const MultiConfigTask& task, std::size_t max_n = kAllDiagnoses,
                                 CheckOptions opts = {});

}  // namespace multiconf
