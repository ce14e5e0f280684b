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

#include <atomic>
#include <chrono>
#include <set>
#include <vector>

#include "multiconf/propagate.hpp"
#include "multiconf/search.hpp"

namespace multiconf::detail {

using Clock = std::chrono::steady_clock;

class Searcher {
 public:
  // With `canonical`, leaves are reduced to canonical_form() and repeats
  // are dropped.
  Searcher(const PropagatorSet& props, const SearchConfig& cfg, bool canonical);

  // Fixpoint on the root store; false when it fails.
  bool root(DomainStore& store);
  // Explores below a store already at fixpoint. Returns false once the search
  // must stop (solution cap or budget).
  bool dfs(const DomainStore& store, int depth);

  std::vector<MultiConfiguration> solutions;
  SearchStats stats;
  bool limit_hit = false;
  bool reached_max = false;

  // Root-split branch index and the shared cutoff: branches past it stop.
  int branch = 0;
  const std::atomic<int>* cutoff = nullptr;
  bool cancelled = false;

 private:
  bool out_of_budget();

  const PropagatorSet& props_;
  const SearchConfig& cfg_;
  Clock::time_point start_;
  bool canonical_;
  std::set<MultiConfiguration> seen_;
};

// Symmetry is handled either by ascending-chain propagators (lexicographic
// order) or by canonicalizing leaves (seeded order, where a chain makes
// random value choices collide with it).
struct SymmetryPlan {
  bool chain = false;
  bool canonical = false;
};
SymmetryPlan plan_symmetry(const MultiConfigTask& task, const SearchConfig& cfg);

// Sorts the exams of instances with forced uniqueness.
MultiConfiguration canonical_form(const MultiConfiguration& conf, const MultiConfigTask& task);

SearchResult finish(std::vector<MultiConfiguration> solutions, SearchStats stats, bool limit_hit,
                    bool reached_max, bool symmetry_active, Clock::time_point start);

}  // namespace multiconf::detail
