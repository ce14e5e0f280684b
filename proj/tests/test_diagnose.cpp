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

#include <doctest.h>

#include <random>

#include "multiconf/diagnose.hpp"
#include "multiconf/error.hpp"
#include "multiconf/exam.hpp"
#include "support/oracle.hpp"

using namespace multiconf;

namespace {

// Six questions: alpha 1, beta 2-3, gamma 4-5, delta 6.
QuestionBank six() {
  return QuestionBank({{1, 1, 1, 5}, {2, 2, 2, 5}, {3, 2, 3, 5}, {4, 3, 2, 5}, {5, 3, 3, 5}, {6, 4, 1, 5}},
                      4, 3);
}

Expr at_least(int instance, int type, int n) {
  return cx::compare(CmpOp::ge,
                     cx::count(Scope::of(InstanceRef::literal(instance)), Predicate::in(Attribute::qtype, {type})),
                     cx::constant(n));
}

std::vector<std::string> ids_of(const std::vector<Requirement>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.id);
  return out;
}
std::vector<std::string> ids_of(const std::vector<NamedConstraint>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}

// Two planted conflicts {a, b} and {c} against C = {g, unique}.
MultiConfigTask two_conflicts() {
  auto bank = six();
  return build_task(bank, 2, 4,
                    {{"a", Owner::examinee(1), at_least(1, 1, 1), ""},
                     {"b", Owner::examinee(1), at_least(1, 2, 2), ""},
                     {"c", Owner::examinee(2), tmpl_exclude_type(bank, 2, 3), ""}},
                    {{"g", tmpl_min_type_count(bank, 4, 3, 2), ""}, {"unique", tmpl_unique_per_exam(bank, 4), ""}});
}

// Gamma exclusion against a gamma minimum, plus three neutral candidates.
MultiConfigTask planted_pair() {
  auto bank = six();
  return build_task(bank, 1, 3, {},
                    {{"n1", tmpl_min_level(bank, 1), ""},
                     {"r2", tmpl_exclude_type(bank, 1, 3), ""},
                     {"n2", tmpl_usage_cap(bank, 6, 1), ""},
                     {"c5", tmpl_min_type_count(bank, 3, 3, 2), ""},
                     {"n3", tmpl_duration(std::nullopt, 0, 100), ""}});
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("check") {
  auto t = planted_pair();
  CHECK(check({"n1", "n2"}, {}, t) == Verdict::consistent);
  CHECK(check({}, {"r2", "c5"}, t) == Verdict::inconsistent);
  CHECK_THROWS_AS(check({"nope"}, {}, t), ModelError);
  std::mt19937_64 rng(41);
  for (int n = 0; n < 20; ++n) {
    auto r = testing::random_task(rng);
    const bool sat = !testing::brute_solutions(r).empty();
    CHECK(check({}, r.all_ids(), r) == (sat ? Verdict::consistent : Verdict::inconsistent));
  }
}

TEST_CASE("min_conflict") {
  auto t = planted_pair();
  SUBCASE("the planted pair") {
    auto c = min_conflict({}, {"r2", "c5"}, t);
    REQUIRE(c);
    CHECK(c->ids == std::vector<std::string>{"r2", "c5"});
  }
  SUBCASE("consistent input") {
    CHECK(!min_conflict({}, {"n1", "n2", "n3"}, t));
  }
  SUBCASE("five candidates with one planted pair") {
    auto c = min_conflict({}, t.all_ids(), t);
    REQUIRE(c);
    testing::SubsetOracle o(t);
    auto all = o.minimal_conflicts(t.all_ids(), {});
    CHECK(all.size() == 1);
    CHECK(all.count(as_set(c->ids)) == 1);
  }
  SUBCASE("inconsistent background") {
    CHECK_THROWS_AS(min_conflict({"r2", "c5"}, {"n1"}, t), BackgroundInconsistent);
  }
}

TEST_CASE("fast_diag") {
  auto bank = six();
  SUBCASE("consistent gives empty") {
    auto t = build_task(bank, 1, 2, {{"r", Owner::examinee(1), tmpl_exclude_type(bank, 1, 1), ""}}, {});
    CHECK(fast_diag({"r"}, {}, t).ids.empty());
  }
  SUBCASE("single contradicting requirement") {
    auto t = build_task(bank, 1, 3, {{"r", Owner::examinee(1), tmpl_exclude_type(bank, 1, 3), ""}},
                        {{"c5", tmpl_min_type_count(bank, 3, 3, 1), ""}});
    CHECK(fast_diag({"r"}, {"c5"}, t).ids == std::vector<std::string>{"r"});
  }
  SUBCASE("keeps the earlier-declared requirement") {
    auto t = two_conflicts();
    CHECK(fast_diag({"a", "b", "c"}, {"g", "unique"}, t).ids == std::vector<std::string>{"b", "c"});
  }
  SUBCASE("background inconsistent") {
    auto t = build_task(bank, 1, 3, {{"r", Owner::instructor(), cx::truth(true), ""}},
                        {{"x", tmpl_exclude_type(bank, 1, 3), ""}, {"y", tmpl_min_type_count(bank, 3, 3, 1), ""}});
    CHECK_THROWS_AS(fast_diag({"r"}, {"x", "y"}, t), BackgroundInconsistent);
  }
}

TEST_CASE("diagnoses") {
  auto t = two_conflicts();
  const std::vector<std::string> req{"a", "b", "c"}, base{"g", "unique"};
  SUBCASE("two independent conflicts") {
    auto ds = diagnoses(req, base, t);
    REQUIRE(ds.size() == 2);
    CHECK(ds[0].ids == std::vector<std::string>{"b", "c"});
    CHECK(ds[1].ids == std::vector<std::string>{"a", "c"});
    ConsistencyChecker checker(t);
    auto ex = explore(checker, req, base);
    CHECK(ex.conflicts.size() == 2);
  }
  SUBCASE("consistent input") {
    CHECK(diagnoses({"a"}, base, t).empty());
  }
  SUBCASE("max_n one equals fast_diag") {
    auto one = diagnoses(req, base, t, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.front() == fast_diag(req, base, t));
  }
}

TEST_CASE("checker caches verdicts") {
  auto t = planted_pair();
  ConsistencyChecker c(t);
  CHECK(!c.consistent({"r2", "c5"}));
  CHECK(!c.consistent({"c5", "r2", "r2"}));
  CHECK(c.solver_calls() == 1);
  CHECK(c.cache_hits() == 1);
}

TEST_CASE("a check hitting its limit aborts diagnosis") {
  auto bank = QuestionBank({{1, 1, 1, 1}, {2, 1, 1, 1}, {3, 1, 1, 1}, {4, 1, 1, 1}, {5, 1, 1, 1},
                            {6, 1, 1, 1}, {7, 1, 1, 1}, {8, 1, 1, 1}});
  // Three disjoint exams of three from eight questions: two nodes cannot
  // settle it.
  auto t = build_task(bank, 3, 3, {{"r", Owner::instructor(), cx::truth(true), ""}},
                      {{"u", tmpl_unique_per_exam(bank, 3), ""},
                       {"o", tmpl_pairwise_overlap(OverlapDirection::at_most, Rational(0), 3), ""}});
  CheckOptions opts;
  opts.node_limit = 2;
  ConsistencyChecker c(t, opts);
  CHECK(c.check({"r", "u", "o"}) == Verdict::unknown);
  CHECK_THROWS_AS(c.consistent({"r", "u", "o"}), CheckUnknown);
}
