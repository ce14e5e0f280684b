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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "multiconf/error.hpp"
#include "multiconf/exam.hpp"
#include "multiconf/search.hpp"
#include "support/oracle.hpp"
#include "support/witnesses.hpp"

using namespace multiconf;

namespace {

std::vector<Question> csv(const std::string& text) {
  std::istringstream in(text);
  return parse_bank_csv(in, "bank.csv");
}

std::string error_of(const std::string& text) {
  try {
    csv(text);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

std::size_t count_solutions(const MultiConfigTask& t, bool symmetry = false) {
  SearchConfig cfg;
  cfg.max_solutions = SearchConfig::kUnbounded;
  cfg.symmetry_breaking = symmetry;
  return enumerate(t, cfg).solutions.size();
}

QuestionBank uniform_bank(int p, int type = 1) {
  std::vector<Question> qs;
  for (int v = 1; v <= p; ++v) qs.push_back({v, type, 1, 1});
  return QuestionBank(qs, 4, 3);
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("bank csv") {
  SUBCASE("five rows") {
    auto qs = csv("id,type,level,duration\n1,1,1,5\n2,2,1,5\n3,1,2,4\n4,3,3,6\n5,2,2,2\n");
    CHECK(QuestionBank(qs).p() == 5);
  }
  SUBCASE("comments, blank lines and column order") {
    auto qs = csv("# bank\n\nlevel,duration,id,type\n2,7,1,3\n# gap\n1,4,2,1\n");
    REQUIRE(qs.size() == 2);
    CHECK(qs[0] == Question{1, 3, 2, 7});
  }
  SUBCASE("duplicate id names both rows") {
    auto e = error_of("id,type,level,duration\n1,1,1,5\n3,1,1,5\n3,2,1,5\n");
    CHECK(e.find("bank.csv:4") != std::string::npos);
    CHECK(e.find("bank.csv:3") != std::string::npos);
    CHECK(e.find("duplicate id 3") != std::string::npos);
  }
  SUBCASE("sparse ids") {
    QuestionBank b(csv("id,type,level,duration\n2,1,1,1\n7,1,1,1\n9,1,1,1\n"));
    CHECK(b.p() == 3);
    CHECK(b.value_of(2) == 1);
    CHECK(b.value_of(7) == 2);
    CHECK(b.value_of(9) == 3);
  }
  SUBCASE("row errors") {
    CHECK(error_of("id,type,level,duration\n1,1,1,0\n").find("bank.csv:2") != std::string::npos);
    CHECK(error_of("id,type,level,duration\n1,1,,4\n").find("missing attribute 'level'") !=
          std::string::npos);
    CHECK(error_of("id,type,level\n1,1,1\n").find("duration") != std::string::npos);
    CHECK(!error_of("id,type,level,duration\n1,x,1,1\n").empty());
    CHECK(!error_of("# nothing\n").empty());
  }
  SUBCASE("load_bank reads csv and json") {
    auto c = temp_file("mc_bank.csv", "id,type,level,duration\n1,1,1,5\n2,2,3,5\n");
    auto j = temp_file("mc_bank.json",
                       R"([{"id": 4, "type": 1, "level": 1, "duration": 5}, {"id": 6, "type": 2, "level": 2, "duration": 3}])");
    CHECK(load_bank(c).p() == 2);
    CHECK(load_bank(c).r() == 3);
    auto b = load_bank(j, 5, 4);
    CHECK(b.q_bar() == 5);
    CHECK(b.value_of(6) == 2);
    CHECK_THROWS_AS(load_bank("/nonexistent/bank.csv"), ModelError);
  }
}

TEST_CASE("rule witnesses") {
  const auto& bank = testing::witness_bank();
  for (const auto& w : testing::witnesses()) {
    CAPTURE(w.rule);
    CHECK(evaluate(w.expr, w.good, bank));
    CHECK(!evaluate(w.expr, w.bad, bank));
  }
}

TEST_CASE("share_max") {
  auto bank = uniform_bank(4, 1);
  CHECK_THROWS_AS(tmpl_share_max(bank, 1, {}, Rational(1, 2)), ModelError);
  CHECK_THROWS_AS(tmpl_share_max(bank, 1, {1}, Rational(3, 2)), ModelError);
  auto none = build_task(bank, 1, 2, {}, {{"r", tmpl_share_max(bank, 1, {1}, Rational(0)), ""}});
  CHECK(count_solutions(none) == 0);
  auto all = build_task(bank, 1, 2, {}, {{"r", tmpl_share_max(bank, 1, {1}, Rational(1)), ""}});
  CHECK(count_solutions(all) == 16);
}

TEST_CASE("exclude_type with no such questions is entailed") {
  auto bank = uniform_bank(3, 1);
  auto t = build_task(bank, 2, 1, {}, {{"c4", tmpl_exclude_type(bank, std::nullopt, 4), ""}});
  CHECK(count_solutions(t) == 9);
}

TEST_CASE("usage_cap and require_one_of") {
  auto bank = uniform_bank(4);
  SUBCASE("cap at k under uniqueness is entailed") {
    auto t = build_task(bank, 2, 2, {},
                        {{"u", tmpl_unique_per_exam(bank, 2), ""}, {"c1", tmpl_usage_cap(bank, 1, 2), ""}});
    CHECK(count_solutions(t) == 144);
  }
  SUBCASE("cap one counted by hand") {
    // k=2, l=1, p=4: 16 pairs minus (1,1).
    auto t = build_task(bank, 2, 1, {}, {{"c1", tmpl_usage_cap(bank, 1, 1), ""}});
    CHECK(count_solutions(t) == 15);
    CHECK(count_solutions(t) == testing::brute_solutions(t).size());
  }
  SUBCASE("whole bank is entailed") {
    auto t = build_task(bank, 2, 1, {}, {{"c2", tmpl_require_one_of(bank, {1, 2, 3, 4}), ""}});
    CHECK(count_solutions(t) == 16);
  }
  SUBCASE("cap zero on u forces v everywhere") {
    auto both = [&](int cap_v) {
      return build_task(bank, 2, 2, {},
                        {{"c2", tmpl_require_one_of(bank, {1, 2}), ""},
                         {"cu", tmpl_usage_cap(bank, 1, 0), ""},
                         {"cv", tmpl_usage_cap(bank, 2, cap_v), ""}});
    };
    auto ok = both(4);
    for (const auto& s : testing::brute_solutions(ok)) {
      CHECK((s.at(1, 1) == 2 || s.at(1, 2) == 2));
      CHECK((s.at(2, 1) == 2 || s.at(2, 2) == 2));
    }
    CHECK(count_solutions(ok) == testing::brute_solutions(ok).size());
    auto bad = both(1);
    CHECK(count_solutions(bad) == 0);
    CHECK(testing::brute_solutions(bad).empty());
  }
  SUBCASE("unknown question") {
    CHECK_THROWS_AS(tmpl_usage_cap(bank, 9, 1), ModelError);
    CHECK_THROWS_AS(tmpl_require_one_of(bank, {}), ModelError);
  }
}

TEST_CASE("min_level and min_type_count") {
  QuestionBank bank({{1, 3, 1, 1}, {2, 3, 2, 1}, {3, 1, 3, 1}, {4, 2, 3, 1}}, 4, 3);
  auto one = build_task(bank, 1, 1, {}, {{"c3", tmpl_min_level(bank, 1), ""}});
  CHECK(count_solutions(one) == 4);
  auto top = build_task(bank, 1, 1, {}, {{"c3", tmpl_min_level(bank, 3), ""}});
  CHECK(count_solutions(top) == 2);
  CHECK_THROWS_AS(tmpl_min_level(bank, 4), ModelError);

  CHECK_THROWS_AS(tmpl_min_type_count(bank, 2, 3, 3), ModelError);
  auto zero = build_task(bank, 1, 2, {}, {{"c5", tmpl_min_type_count(bank, 2, 3, 0), ""}});
  CHECK(count_solutions(zero) == 16);
  // Two gamma questions, three required, uniqueness on.
  auto pig = build_task(bank, 1, 3, {},
                        {{"u", tmpl_unique_per_exam(bank, 3), ""}, {"c5", tmpl_min_type_count(bank, 3, 3, 3), ""}});
  CHECK(count_solutions(pig) == 0);
}

TEST_CASE("duration") {
  // Durations 1, 2, 4, 8: every 2-subset has a distinct sum.
  QuestionBank bank({{1, 1, 1, 1}, {2, 1, 1, 2}, {3, 1, 1, 4}, {4, 1, 1, 8}}, 1, 1);
  auto with = [&](int lo, int hi) {
    return build_task(bank, 1, 2, {},
                      {{"u", tmpl_unique_per_exam(bank, 2), ""}, {"c6", tmpl_duration(std::nullopt, lo, hi), ""}});
  };
  auto exact = enumerate(with(10, 10), [] {
    SearchConfig c;
    c.max_solutions = SearchConfig::kUnbounded;
    return c;
  }());
  REQUIRE(exact.solutions.size() == 1);
  CHECK(exact.solutions.front() == MultiConfiguration(1, 2, {2, 4}));
  CHECK(count_solutions(with(0, 15), true) == 6);
  CHECK(count_solutions(with(7, 7)) == 0);
  CHECK(testing::brute_solutions(with(7, 7)).empty());
  CHECK_THROWS_AS(tmpl_duration(1, 5, 4), ModelError);
}

TEST_CASE("share_range") {
  auto bank = uniform_bank(4);
  CHECK_THROWS_AS(tmpl_share_range(bank, 1, 1, Rational(1, 2), Rational(1, 4)), ModelError);
  auto any = build_task(bank, 1, 2, {},
                        {{"c7", tmpl_share_range(bank, std::nullopt, 1, Rational(0), Rational(1)), ""}});
  CHECK(count_solutions(any) == 16);

  json doc = json::parse(R"({
    "bank": [{"id": 1, "type": 1, "level": 3, "duration": 1}, {"id": 2, "type": 1, "level": 1, "duration": 1}],
    "instances": {"k": 1, "l": 10},
    "templates": [{"id": "c7", "tag": "share_range",
                   "params": {"instance": "all", "level": 3, "lo": 0.16, "hi": 0.18}}]})");
  auto m = compile_exam_model(doc);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("c7") != std::string::npos);
  CHECK(m.warnings[0].find("[8/5, 9/5]") != std::string::npos);
  CHECK(solve(m.task, {}).status == SearchStatus::unsat);
}

TEST_CASE("unique_per_exam") {
  auto bank = uniform_bank(3);
  CHECK_THROWS_AS(tmpl_unique_per_exam(bank, 4), ModelError);
  auto perm = build_task(bank, 2, 3, {}, {{"u", tmpl_unique_per_exam(bank, 3), ""}});
  CHECK(count_solutions(perm, true) == 1);
  CHECK(!evaluate(tmpl_unique_per_exam(bank, 2), MultiConfiguration(1, 2, {2, 2}), bank));
  for (int p = 2; p <= 5; ++p)
    for (int l = 1; l <= std::min(p, 3); ++l) {
      auto b = uniform_bank(p);
      auto t = build_task(b, 2, l, {}, {{"u", tmpl_unique_per_exam(b, l), ""}});
      std::size_t choose = 1;
      for (int n = 0; n < l; ++n) choose = choose * static_cast<std::size_t>(p - n) / static_cast<std::size_t>(n + 1);
      CHECK(count_solutions(t, true) == choose * choose);
    }
}

TEST_CASE("pairwise_overlap") {
  auto bank = uniform_bank(4);
  auto with = [&](OverlapDirection d, Rational b, int l) {
    return build_task(bank, 2, l, {},
                      {{"u", tmpl_unique_per_exam(bank, l), ""}, {"o", tmpl_pairwise_overlap(d, b, l), ""}});
  };
  for (const auto& s : testing::brute_solutions(with(OverlapDirection::at_most, Rational(0), 2))) {
    for (int v : s.exam(1))
      CHECK(std::find(s.exam(2).begin(), s.exam(2).end(), v) == s.exam(2).end());
  }
  CHECK(count_solutions(with(OverlapDirection::at_most, Rational(0), 2), true) == 6);
  CHECK(count_solutions(with(OverlapDirection::at_least, Rational(1), 2), true) == 6);
  auto half = with(OverlapDirection::at_most, Rational(1, 2), 2);
  CHECK(count_solutions(half) == testing::brute_solutions(half).size());
  // 6 x 6 pairs of 2-sets, minus the 6 identical ones.
  CHECK(count_solutions(half, true) == 30);
  CHECK(parse_overlap_direction("at_least") == OverlapDirection::at_least);
  CHECK(!parse_overlap_direction("more"));
}

TEST_CASE("template tags round trip") {
  for (std::size_t n = 0; n < kTemplateCount; ++n) {
    auto t = static_cast<TemplateTag>(n);
    CHECK(parse_template_tag(to_string(t)) == t);
  }
}

TEST_CASE("model compilation") {
  json doc = json::parse(R"({
    "bank": [{"id": 1, "type": 1, "level": 1, "duration": 5}, {"id": 2, "type": 2, "level": 2, "duration": 5},
             {"id": 3, "type": 3, "level": 2, "duration": 5}],
    "instances": {"k": 2, "l": 2},
    "requirements": [{"id": "x", "owner": "instructor", "expr": true}],
    "templates": [
      {"id": "r1", "tag": "share_max", "params": {"instance": 1, "categories": [1], "bound": "1/2"}},
      {"id": "c4", "tag": "exclude_type", "params": {"instance": "all", "category": 3}},
      {"id": "r2", "tag": "exclude_type", "params": {"instance": 2, "category": 2}},
      {"id": "c1", "tag": "usage_cap", "role": "requirement", "params": {"question": 1, "max": 1}}]})");
  auto m = compile_exam_model(doc);
  CHECK(m.task.requirements().size() == 4);
  CHECK(m.task.constraints().size() == 1);
  REQUIRE(m.provenance_of("r1"));
  CHECK(m.provenance_of("r1")->tag == TemplateTag::share_max);
  CHECK(m.provenance_of("r1")->owner == Owner::examinee(1));
  CHECK(m.provenance_of("r2")->requirement);
  CHECK(!m.provenance_of("c4")->requirement);
  CHECK(m.provenance_of("c4")->owner == Owner::instructor());
  CHECK(m.provenance_of("c1")->requirement);
  CHECK(!m.provenance_of("x")->tag);

  doc["templates"][0]["params"].erase("bound");
  try {
    compile_exam_model(doc);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("/templates/0") != std::string::npos);
    CHECK(std::string(e.what()).find("bound") != std::string::npos);
  }
}

TEST_CASE("report") {
  auto t = build_task(testing::witness_bank(), 2, 4, {}, {});
  const MultiConfiguration c(2, 4, {1, 2, 3, 4, 3, 4, 5, 6});
  auto r = report(c, t);
  CHECK(r.durations == std::vector<std::int64_t>{30, 35});
  CHECK(r.type_histogram[0] == std::vector<int>{1, 1, 2, 0});
  CHECK(r.type_histogram[1] == std::vector<int>{0, 0, 3, 1});
  CHECK(r.level_histogram[0] == std::vector<int>{1, 2, 1});
  CHECK(r.level_histogram[1] == std::vector<int>{1, 1, 2});
  CHECK(r.overlap == std::vector<std::vector<int>>{{4, 2}, {2, 4}});
  CHECK(r.usage[2] == std::pair<int, int>{3, 2});
  CHECK(r.usage[7] == std::pair<int, int>{8, 0});

  auto single = report(MultiConfiguration(1, 4, {1, 2, 3, 4}), build_task(testing::witness_bank(), 1, 4, {}, {}));
  CHECK(single.overlap == std::vector<std::vector<int>>{{4}});
  auto same = report(MultiConfiguration(2, 4, {1, 2, 3, 4, 4, 3, 2, 1}), t);
  CHECK(same.overlap[0][1] == 4);

  auto strict = build_task(testing::witness_bank(), 2, 4, {}, {{"c4", tmpl_exclude_type(testing::witness_bank(), std::nullopt, 4), ""}});
  CHECK_THROWS_AS(report(c, strict), VerificationError);
  CHECK_THROWS_AS(report(MultiConfiguration(1, 4, {1, 2, 3, 4}), t), VerificationError);
  CHECK(to_json(r)["overlap"][0][1] == 2);
  CHECK(format_report(r).find("overlap") != std::string::npos);
}
