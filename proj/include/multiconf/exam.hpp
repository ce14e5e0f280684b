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

// Exam generation on top of the generic engine: question-bank loading,
// constraint templates for the exam rules, model files that mix templates
// with raw expressions, and descriptive reports over generated exam sets.

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiconf/model.hpp"
#include "multiconf/task_io.hpp"

namespace multiconf {

// --- banks -----------------------------------------------------------------

// CSV with header `id,type,level,duration`; `#` lines and blank lines are
// skipped. Errors name the 1-based line number.
std::vector<Question> parse_bank_csv(std::istream& in, const std::string& name = "bank");

// CSV or JSON (by extension). Input ids keep their order; when they are not
// 1..p, values are assigned by position and value_of() is the remap.
QuestionBank load_bank(const std::filesystem::path& path, int q_bar = 0, int r = 0);

// --- templates -------------------------------------------------------------
// Every builder validates its parameters against the bank and throws
// ModelError on authoring errors. Instance arguments are 1-based; nullopt
// means every instance.

Expr tmpl_share_max(const QuestionBank& bank, int instance, std::vector<int> categories,
                    Rational bound, bool strict = false);
Expr tmpl_exclude_type(const QuestionBank& bank, std::optional<int> instance, int category);
Expr tmpl_usage_cap(const QuestionBank& bank, int question_id, int max_uses);
Expr tmpl_require_one_of(const QuestionBank& bank, std::vector<int> question_ids);
Expr tmpl_min_level(const QuestionBank& bank, int level);
Expr tmpl_min_type_count(const QuestionBank& bank, int l, int category, int n);
Expr tmpl_duration(std::optional<int> instance, int lo, int hi);
Expr tmpl_share_range(const QuestionBank& bank, std::optional<int> instance, int level,
                      Rational lo, Rational hi, bool strict = false);
Expr tmpl_unique_per_exam(const QuestionBank& bank, int l);

enum class OverlapDirection { at_most, at_least };
std::optional<OverlapDirection> parse_overlap_direction(std::string_view s);
std::string_view to_string(OverlapDirection d);

Expr tmpl_pairwise_overlap(OverlapDirection direction, Rational bound, int l);

enum class TemplateTag {
  share_max,
  exclude_type,
  usage_cap,
  require_one_of,
  min_level,
  min_type_count,
  duration,
  share_range,
  unique_per_exam,
  pairwise_overlap,
};

std::string_view to_string(TemplateTag t);
std::optional<TemplateTag> parse_template_tag(std::string_view s);
inline constexpr std::size_t kTemplateCount = 10;

// Where a constraint id came from, for validation and diagnosis output.
struct Provenance {
  std::string id;
  bool requirement = false;
  Owner owner;
  std::optional<TemplateTag> tag;  // nullopt for raw expressions
  json params;
  std::string label;

  std::string describe() const;
};

// --- models ----------------------------------------------------------------

struct ExamModel {
  std::shared_ptr<const QuestionBank> bank;
  int k = 0;
  int l = 0;
  std::vector<Provenance> provenance;  // declaration order, requirements first
  std::vector<std::string> warnings;
  MultiConfigTask task;

  const Provenance* provenance_of(std::string_view id) const;
};

// Compiles a model document: the task JSON plus an optional `templates`
// array. A `bank` of the form {"csv": path} is resolved against base_dir.
ExamModel compile_exam_model(const json& doc, const std::filesystem::path& base_dir = ".");
ExamModel load_exam_model(const std::filesystem::path& path);

// --- reports ---------------------------------------------------------------

struct ExamReport {
  int k = 0;
  int l = 0;
  std::vector<std::int64_t> durations;                 // per examinee
  std::vector<std::vector<int>> type_histogram;        // [examinee][type-1]
  std::vector<std::vector<int>> level_histogram;       // [examinee][level-1]
  std::vector<std::vector<int>> overlap;               // k x k, multiset intersection
  std::vector<std::pair<int, int>> usage;              // (question id, uses), bank order
};

// Throws VerificationError naming the violated constraint if `conf` is not a
// solution of `task`.
ExamReport report(const MultiConfiguration& conf, const MultiConfigTask& task);
std::vector<ExamReport> report(std::span<const MultiConfiguration> solutions,
                               const MultiConfigTask& task);

json to_json(const ExamReport& r);
std::string format_report(const ExamReport& r);

}  // namespace multiconf
