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

#include <atomic>
#include <mutex>
#include <set>
#include <stdexcept>

#include "multiconf/search.hpp"
#include "search_internal.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace multiconf {

SearchResult enumerate_parallel(const MultiConfigTask& task, const SearchConfig& cfg,
                                int threads) {
  if (cfg.max_solutions == 0) throw std::invalid_argument("max_solutions must be >= 1");
  const auto start = detail::Clock::now();
  const auto plan = detail::plan_symmetry(task, cfg);
  const bool symmetry = plan.chain || plan.canonical;
  const PropagatorSet props =
      PropagatorSet::compile(task, CompileOptions{.symmetry_breaking = plan.chain});

  detail::Searcher top(props, cfg, plan.canonical);
  DomainStore root = props.init_store();
  if (!top.root(root))
    return detail::finish({}, top.stats, false, false, symmetry, start);
  const auto var = choose_variable(root);
  if (!var) {
    top.dfs(root, 0);
    return detail::finish(std::move(top.solutions), top.stats, false, top.reached_max,
                          symmetry, start);
  }

  const std::vector<int> values = order_values(root, *var, cfg, 0);
  const int n = static_cast<int>(values.size());
  struct Branch {
    std::vector<MultiConfiguration> solutions;
    SearchStats stats;
    bool limit_hit = false;
    bool reached_max = false;
    std::exception_ptr error;
  };
  std::vector<Branch> branches(values.size());

  // Once the finished prefix of branches holds max_solutions, later branches
  // cannot contribute and are cancelled.
  std::atomic<int> cutoff{n};
  std::mutex mu;
  std::vector<char> done(values.size(), 0);
  int prefix = 0;
  std::set<MultiConfiguration> prefix_seen;
  std::size_t prefix_count = 0;

#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (int b = 0; b < n; ++b) {
    Branch& out = branches[static_cast<std::size_t>(b)];
    try {
      detail::Searcher s(props, cfg, plan.canonical);
      s.branch = b;
      s.cutoff = &cutoff;
      ++s.stats.nodes;
      DomainStore child = root;
      child.assign(*var, values[static_cast<std::size_t>(b)]);
      ++s.stats.propagation_fixpoints;
      if (props.fixpoint(child, false)) {
        s.dfs(child, 1);
      } else {
        ++s.stats.failures;
      }
      out.solutions = std::move(s.solutions);
      out.stats = s.stats;
      out.limit_hit = s.limit_hit;
      out.reached_max = s.reached_max;
    } catch (...) {
      out.error = std::current_exception();
    }
    std::lock_guard lock(mu);
    done[static_cast<std::size_t>(b)] = 1;
    while (prefix < n && done[static_cast<std::size_t>(prefix)] &&
           cutoff.load() == n) {
      const Branch& br = branches[static_cast<std::size_t>(prefix)];
      if (br.error) break;
      for (const auto& sol : br.solutions)
        if (!plan.canonical || prefix_seen.insert(sol).second) ++prefix_count;
      if (prefix_count >= cfg.max_solutions) cutoff.store(prefix);
      ++prefix;
    }
  }
  (void)threads;

  // Merge in value order; a branch cut short by its budget or its own cap
  // only matters if the global cap was not already met by earlier branches.
  // Canonical forms can repeat across branches.
  std::vector<MultiConfiguration> merged;
  std::set<MultiConfiguration> seen;
  SearchStats stats = top.stats;
  bool limit_hit = false;
  bool reached_max = false;
  for (Branch& br : branches) {
    if (br.error) std::rethrow_exception(br.error);
    stats += br.stats;
    if (reached_max) continue;
    for (auto& s : br.solutions) {
      if (plan.canonical && !seen.insert(s).second) continue;
      merged.push_back(std::move(s));
      if (merged.size() >= cfg.max_solutions) {
        reached_max = true;
        break;
      }
    }
    if (!reached_max && (br.limit_hit || br.reached_max)) limit_hit = true;
  }
  return detail::finish(std::move(merged), stats, limit_hit, reached_max,
                        symmetry, start);
}

}  // namespace multiconf
