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

// Complete depth-first search over the domain store: fail-first variable
// choice, lexicographic or seeded value order, ascending-slot symmetry
// breaking, and enumeration of distinct multi-configurations.

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "multiconf/model.hpp"
#include "multiconf/propagate.hpp"

namespace multiconf {

enum class ValueOrder { lexicographic, seeded_shuffle };

std::string_view to_string(ValueOrder v);
std::optional<ValueOrder> parse_value_order(std::string_view s);

struct SearchConfig {
  std::uint64_t seed = 0;
  std::size_t max_solutions = 1;
  std::optional<std::uint64_t> node_limit;
  std::optional<std::chrono::milliseconds> time_limit;
  bool symmetry_breaking = true;
  ValueOrder value_order = ValueOrder::lexicographic;

  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t failures = 0;
  std::uint64_t propagation_fixpoints = 0;
  double elapsed_ms = 0;

  SearchStats& operator+=(const SearchStats& o) {
    nodes += o.nodes;
    failures += o.failures;
    propagation_fixpoints += o.propagation_fixpoints;
    return *this;
  }
};

enum class SearchStatus {
  sat,      // at least one solution returned
  unsat,    // search space exhausted without a solution
  unknown,  // a limit stopped the search before any solution
};

std::string_view to_string(SearchStatus s);

struct SearchResult {
  SearchStatus status = SearchStatus::unknown;
  std::vector<MultiConfiguration> solutions;
  SearchStats stats;
  // True when the whole search space was explored.
  bool exhausted = false;
  // True when ascending-slot symmetry breaking was in force.
  bool symmetry_active = false;
};

// One solution, or a proof that none exists.
SearchResult solve(const MultiConfigTask& task, SearchConfig cfg);
// Up to cfg.max_solutions pairwise-distinct solutions in DFS order. Every
// solution is re-checked with is_consistent before it is returned.
SearchResult enumerate(const MultiConfigTask& task, const SearchConfig& cfg);

// Parallel variant: the root decision's values are searched by OpenMP
// workers and merged in value order, so the solution sequence equals the
// serial one. Limits apply per root branch. threads = 0 uses the OpenMP
// default.
SearchResult enumerate_parallel(const MultiConfigTask& task, const SearchConfig& cfg,
                                int threads = 0);

// Open slot with the smallest domain, ties broken by (instance, slot).
// nullopt when every slot is fixed.
std::optional<int> choose_variable(const DomainStore& store);

// Values (1-based) of `flat`'s domain in search order. The seeded order is a
// permutation drawn from a generator keyed by (seed, instance, slot, depth).
std::vector<int> order_values(const DomainStore& store, int flat, const SearchConfig& cfg,
                              int depth);

}  // namespace multiconf
