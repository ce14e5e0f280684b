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

#include "witnesses.hpp"

#include "multiconf/exam.hpp"

namespace multiconf::testing {

namespace {

MultiConfiguration exams(std::vector<int> a, std::vector<int> b) {
  a.insert(a.end(), b.begin(), b.end());
  return MultiConfiguration(2, 4, a);
}

}  // namespace

const QuestionBank& witness_bank() {
  // id, type (1 alpha, 2 beta, 3 gamma, 4 delta), level, duration
  static const QuestionBank bank({{1, 1, 1, 5},
                                  {2, 2, 2, 5},
                                  {3, 3, 3, 10},
                                  {4, 3, 2, 10},
                                  {5, 3, 3, 5},
                                  {6, 4, 1, 10},
                                  {7, 2, 3, 5},
                                  {8, 1, 2, 10}},
                                 4, 3);
  return bank;
}

std::vector<Witness> witnesses() {
  const auto& b = witness_bank();
  return {
      {"r1", tmpl_share_max(b, 1, {1, 2}, Rational::parse("0.3")),
       exams({1, 3, 4, 5}, {1, 2, 7, 8}), exams({1, 2, 3, 4}, {1, 2, 7, 8})},
      {"r2", tmpl_exclude_type(b, 1, 3), exams({1, 2, 6, 7}, {1, 3, 4, 5}),
       exams({1, 2, 3, 6}, {1, 3, 4, 5})},
      {"c1", tmpl_usage_cap(b, 3, 1), exams({1, 2, 3, 4}, {4, 5, 6, 7}),
       exams({1, 2, 3, 4}, {3, 5, 6, 7})},
      {"c2", tmpl_require_one_of(b, {3, 8}), exams({1, 2, 3, 4}, {5, 6, 7, 8}),
       exams({1, 2, 3, 4}, {4, 5, 6, 7})},
      {"c3", tmpl_min_level(b, 2), exams({2, 3, 4, 5}, {3, 4, 7, 8}),
       exams({2, 3, 4, 5}, {1, 3, 4, 7})},
      {"c4", tmpl_exclude_type(b, std::nullopt, 4), exams({1, 2, 3, 4}, {2, 5, 7, 8}),
       exams({1, 2, 3, 4}, {5, 6, 7, 8})},
      {"c5", tmpl_min_type_count(b, 4, 3, 2), exams({1, 2, 3, 4}, {4, 5, 6, 7}),
       exams({1, 2, 3, 4}, {3, 6, 7, 8})},
      {"c6", tmpl_duration(std::nullopt, 25, 30), exams({1, 2, 3, 4}, {1, 2, 5, 6}),
       exams({1, 2, 3, 4}, {3, 4, 6, 8})},
      {"c7", tmpl_share_range(b, std::nullopt, 3, Rational(1, 4), Rational(1, 2)),
       exams({1, 2, 3, 4}, {1, 2, 3, 5}), exams({1, 2, 3, 4}, {1, 3, 5, 7})},
      {"unique", tmpl_unique_per_exam(b, 4), exams({1, 2, 3, 4}, {5, 6, 7, 8}),
       exams({1, 1, 3, 4}, {5, 6, 7, 8})},
      {"overlap", tmpl_pairwise_overlap(OverlapDirection::at_most, Rational(1, 2), 4),
       exams({1, 2, 3, 4}, {3, 4, 5, 6}), exams({1, 2, 3, 4}, {2, 3, 4, 5})},
  };
}

}  // namespace multiconf::testing
