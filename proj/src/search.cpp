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

#include "multiconf/search.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "search_internal.hpp"

namespace multiconf {

std::string_view to_string(ValueOrder v) {
  return v == ValueOrder::lexicographic ? "lexicographic" : "seeded_shuffle";
}

std::optional<ValueOrder> parse_value_order(std::string_view s) {
  if (s == "lexicographic" || s == "lex") return ValueOrder::lexicographic;
  if (s == "seeded_shuffle" || s == "shuffle") return ValueOrder::seeded_shuffle;
  return std::nullopt;
}

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::sat: return "sat";
    case SearchStatus::unsat: return "unsat";
    case SearchStatus::unknown: return "unknown";
  }
  return "?";
}

std::optional<int> choose_variable(const DomainStore& store) {
  std::optional<int> best;
  std::size_t best_size = 0;
  for (int s = 0; s < store.slot_count(); ++s) {
    const std::size_t size = store.size(s);
    if (size <= 1) continue;
    if (!best || size < best_size) {
      best = s;
      best_size = size;
      if (size == 2) break;
    }
  }
  return best;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<int> order_values(const DomainStore& store, int flat, const SearchConfig& cfg,
                              int depth) {
  std::vector<int> values;
  store.domain(flat).for_each([&](std::size_t v) { values.push_back(static_cast<int>(v) + 1); });
  if (cfg.value_order == ValueOrder::seeded_shuffle && values.size() > 1) {
    const auto instance = static_cast<std::uint64_t>(flat / store.l() + 1);
    const auto slot = static_cast<std::uint64_t>(flat % store.l() + 1);
    std::uint64_t key = splitmix64(static_cast<std::uint64_t>(depth));
    key = splitmix64(slot ^ key);
    key = splitmix64(instance ^ key);
    key = splitmix64(cfg.seed ^ key);
    // mt19937_64 output is fixed by the standard; the Fisher-Yates loop is
    // spelled out so the permutation does not depend on the library.
    std::mt19937_64 rng(key);
    for (std::size_t i = values.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(values[i], values[j]);
    }
  }
  return values;
}

namespace detail {

Searcher::Searcher(const PropagatorSet& props, const SearchConfig& cfg, bool canonical)
    : props_(props), cfg_(cfg), start_(Clock::now()), canonical_(canonical) {}

SymmetryPlan plan_symmetry(const MultiConfigTask& task, const SearchConfig& cfg) {
  SymmetryPlan plan;
  if (!cfg.symmetry_breaking || task.references_slot_index() || !task.any_unique() ||
      task.l() < 2)
    return plan;
  plan.chain = cfg.value_order == ValueOrder::lexicographic;
  plan.canonical = !plan.chain;
  return plan;
}

MultiConfiguration canonical_form(const MultiConfiguration& conf, const MultiConfigTask& task) {
  std::vector<int> ids = conf.ids();
  for (int i = 1; i <= conf.k(); ++i) {
    if (!task.unique_instance(i)) continue;
    const auto first = ids.begin() + static_cast<std::ptrdiff_t>((i - 1) * conf.l());
    std::sort(first, first + conf.l());
  }
  return MultiConfiguration(conf.k(), conf.l(), std::move(ids));
}

bool Searcher::out_of_budget() {
  if (cfg_.node_limit && stats.nodes >= *cfg_.node_limit) return true;
  if (cfg_.time_limit && (stats.nodes & 255) == 0 && Clock::now() - start_ >= *cfg_.time_limit)
    return true;
  return false;
}

bool Searcher::dfs(const DomainStore& store, int depth) {
  const auto var = choose_variable(store);
  if (!var) {
    MultiConfiguration conf = store.assignment();
    if (canonical_) {
      conf = canonical_form(conf, props_.task());
      if (!seen_.insert(conf).second) return true;
    }
    if (auto bad = first_violation(conf, props_.task()))
      throw std::logic_error("search produced a configuration violating '" + *bad + "'");
    solutions.push_back(std::move(conf));
    if (solutions.size() >= cfg_.max_solutions) {
      reached_max = true;
      return false;
    }
    return true;
  }
  for (int v : order_values(store, *var, cfg_, depth)) {
    if (cutoff && branch > cutoff->load(std::memory_order_relaxed)) {
      cancelled = true;
      return false;
    }
    if (out_of_budget()) {
      limit_hit = true;
      return false;
    }
    ++stats.nodes;
    DomainStore child = store;
    child.assign(*var, v);
    ++stats.propagation_fixpoints;
    if (!props_.fixpoint(child, false)) {
      ++stats.failures;
      continue;
    }
    if (!dfs(child, depth + 1)) return false;
  }
  return true;
}

bool Searcher::root(DomainStore& store) {
  ++stats.nodes;
  ++stats.propagation_fixpoints;
  if (!props_.fixpoint(store, true)) {
    ++stats.failures;
    return false;
  }
  return true;
}

SearchResult finish(std::vector<MultiConfiguration> solutions, SearchStats stats, bool limit_hit,
                    bool reached_max, bool symmetry_active, Clock::time_point start) {
  SearchResult r;
  r.solutions = std::move(solutions);
  r.stats = stats;
  r.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  r.exhausted = !limit_hit && !reached_max;
  r.symmetry_active = symmetry_active;
  if (!r.solutions.empty()) {
    r.status = SearchStatus::sat;
  } else {
    r.status = limit_hit ? SearchStatus::unknown : SearchStatus::unsat;
  }
  return r;
}

}  // namespace detail

SearchResult enumerate(const MultiConfigTask& task, const SearchConfig& cfg) {
  if (cfg.max_solutions == 0) throw std::invalid_argument("max_solutions must be >= 1");
  const auto start = detail::Clock::now();
  const auto plan = detail::plan_symmetry(task, cfg);
  const PropagatorSet props =
      PropagatorSet::compile(task, CompileOptions{.symmetry_breaking = plan.chain});
  detail::Searcher searcher(props, cfg, plan.canonical);
  DomainStore root = props.init_store();
  if (searcher.root(root)) searcher.dfs(root, 0);
  return detail::finish(std::move(searcher.solutions), searcher.stats, searcher.limit_hit,
                        searcher.reached_max, plan.chain || plan.canonical, start);
}

SearchResult solve(const MultiConfigTask& task, SearchConfig cfg) {
  cfg.max_solutions = 1;
  return enumerate(task, cfg);
}

}  // namespace multiconf
