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

#include "multiconf/diagnose.hpp"

#include <algorithm>
#include <set>

#include "multiconf/error.hpp"
#include "multiconf/search.hpp"

namespace multiconf {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

ConsistencyChecker::ConsistencyChecker(const MultiConfigTask& task, CheckOptions opts)
    : task_(task), opts_(opts) {}

Verdict ConsistencyChecker::check(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (auto it = cache_.find(ids); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  ++calls_;
  SearchConfig cfg;
  cfg.node_limit = opts_.node_limit;
  cfg.time_limit = opts_.time_limit;
  const SearchResult r = solve(task_.restricted_to(ids), cfg);
  Verdict v = Verdict::unknown;
  if (r.status == SearchStatus::sat) v = Verdict::consistent;
  if (r.status == SearchStatus::unsat) v = Verdict::inconsistent;
  cache_.emplace(std::move(ids), v);
  return v;
}

bool ConsistencyChecker::consistent(std::vector<std::string> ids) {
  const Verdict v = check(ids);
  if (v == Verdict::unknown) {
    std::string msg = "consistency check hit its limit on {";
    for (std::size_t i = 0; i < ids.size(); ++i) msg += (i ? ", " : "") + ids[i];
    throw CheckUnknown(msg + "}; raise the node limit");
  }
  return v == Verdict::consistent;
}

Verdict check(const std::vector<std::string>& background,
              const std::vector<std::string>& candidate, const MultiConfigTask& task,
              CheckOptions opts) {
  ConsistencyChecker checker(task, opts);
  std::vector<std::string> all = background;
  all.insert(all.end(), candidate.begin(), candidate.end());
  return checker.check(std::move(all));
}

namespace {

using Ids = std::vector<std::string>;

Ids join(const Ids& a, const Ids& b) {
  Ids r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Ids minus(const Ids& a, const Ids& b) {
  Ids r;
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) == b.end()) r.push_back(x);
  return r;
}

// Reorders `subset` to follow `order`.
Ids in_order(const Ids& subset, const Ids& order) {
  Ids r;
  for (const auto& x : order)
    if (std::find(subset.begin(), subset.end(), x) != subset.end()) r.push_back(x);
  return r;
}

void require_background(ConsistencyChecker& checker, const Ids& background) {
  if (!checker.consistent(background))
    throw BackgroundInconsistent(
        "the background constraints are inconsistent on their own; diagnose them as "
        "candidates instead (foreground = all)");
}

// QuickXPlain recursion.
Ids qx(ConsistencyChecker& checker, const Ids& b, bool delta, const Ids& c) {
  if (delta && !checker.consistent(b)) return {};
  if (c.size() == 1) return c;
  const auto half = static_cast<std::ptrdiff_t>(c.size() / 2);
  const Ids c1(c.begin(), c.begin() + half);
  const Ids c2(c.begin() + half, c.end());
  const Ids d2 = qx(checker, join(b, c1), !c1.empty(), c2);
  const Ids d1 = qx(checker, join(b, d2), !d2.empty(), c1);
  return join(d1, d2);
}

// FastDiag recursion. Elements early in `c` are removed first.
Ids fd(ConsistencyChecker& checker, bool delta, const Ids& c, const Ids& ac) {
  if (delta && checker.consistent(ac)) return {};
  if (c.size() == 1) return c;
  const auto half = static_cast<std::ptrdiff_t>(c.size() / 2);
  const Ids c1(c.begin(), c.begin() + half);
  const Ids c2(c.begin() + half, c.end());
  const Ids d1 = fd(checker, !c1.empty(), c2, minus(ac, c1));
  const Ids d2 = fd(checker, !d1.empty(), c1, minus(ac, d1));
  return join(d1, d2);
}

}  // namespace

std::optional<Conflict> min_conflict(ConsistencyChecker& checker, const Ids& background,
                                     const Ids& candidates) {
  require_background(checker, background);
  if (checker.consistent(join(background, candidates))) return std::nullopt;
  const Ids found = qx(checker, background, false, candidates);
  return Conflict{in_order(found, candidates)};
}

std::optional<Conflict> min_conflict(const Ids& background, const Ids& candidates,
                                     const MultiConfigTask& task, CheckOptions opts) {
  ConsistencyChecker checker(task, opts);
  return min_conflict(checker, background, candidates);
}

Diagnosis fast_diag(ConsistencyChecker& checker, const Ids& requirements, const Ids& base) {
  require_background(checker, base);
  const Ids all = join(base, requirements);
  if (checker.consistent(all)) return {};
  // Last-declared requirements go first so they are the ones given up.
  const Ids reversed(requirements.rbegin(), requirements.rend());
  const Ids found = fd(checker, false, reversed, all);
  return Diagnosis{in_order(found, requirements)};
}

Diagnosis fast_diag(const Ids& requirements, const Ids& base, const MultiConfigTask& task,
                    CheckOptions opts) {
  ConsistencyChecker checker(task, opts);
  return fast_diag(checker, requirements, base);
}

Exploration explore(ConsistencyChecker& checker, const Ids& requirements, const Ids& base,
                    std::size_t max_n) {
  Exploration out;
  require_background(checker, base);
  if (max_n == 0 || checker.consistent(join(base, requirements))) return out;

  using Path = std::vector<int>;  // sorted indices into requirements
  const auto pick = [&](const Path& p) {
    Ids r;
    for (int i : p) r.push_back(requirements[static_cast<std::size_t>(i)]);
    return r;
  };
  std::vector<Path> conflicts;
  std::vector<Path> found;
  std::vector<Path> level{Path{}};
  while (!level.empty()) {
    std::vector<Path> level_diags;
    std::vector<Path> next;
    std::set<Path> seen;
    for (const Path& h : level) {
      const bool closed = std::any_of(found.begin(), found.end(), [&](const Path& d) {
        return std::includes(h.begin(), h.end(), d.begin(), d.end());
      });
      if (closed) continue;

      const Path* label = nullptr;
      for (const Path& c : conflicts) {
        const bool disjoint = std::none_of(c.begin(), c.end(), [&](int e) {
          return std::binary_search(h.begin(), h.end(), e);
        });
        if (disjoint) {
          label = &c;
          break;
        }
      }
      if (label == nullptr) {
        Ids kept;
        for (std::size_t i = 0; i < requirements.size(); ++i)
          if (!std::binary_search(h.begin(), h.end(), static_cast<int>(i)))
            kept.push_back(requirements[i]);
        if (checker.consistent(join(base, kept))) {
          level_diags.push_back(h);
          continue;
        }
        const Ids c = qx(checker, base, false, kept);
        Path cp;
        for (const auto& id : c)
          cp.push_back(static_cast<int>(
              std::find(requirements.begin(), requirements.end(), id) - requirements.begin()));
        std::sort(cp.begin(), cp.end());
        conflicts.push_back(std::move(cp));
        out.conflicts.push_back(Conflict{in_order(c, requirements)});
        label = &conflicts.back();
      }
      for (int e : *label) {
        Path child = h;
        child.insert(std::upper_bound(child.begin(), child.end(), e), e);
        if (seen.insert(child).second) next.push_back(std::move(child));
      }
    }
    // Same-size diagnoses: the one keeping the earliest-declared differing
    // requirement comes first, i.e. larger index at the first difference.
    std::sort(level_diags.begin(), level_diags.end(), std::greater<>());
    for (Path& d : level_diags) {
      if (out.diagnoses.size() < max_n) out.diagnoses.push_back(Diagnosis{pick(d)});
      found.push_back(std::move(d));
    }
    if (out.diagnoses.size() >= max_n) break;
    level = std::move(next);
  }
  return out;
}

std::vector<Diagnosis> diagnoses(const Ids& requirements, const Ids& base,
                                 const MultiConfigTask& task, std::size_t max_n,
                                 CheckOptions opts) {
  ConsistencyChecker checker(task, opts);
  return explore(checker, requirements, base, max_n).diagnoses;
}

}  // namespace multiconf
