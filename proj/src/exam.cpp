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

#include "multiconf/exam.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "multiconf/error.hpp"

namespace multiconf {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ModelError(where + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Rejects duplicate ids, naming both rows.
void check_unique(const std::vector<Question>& qs, const std::vector<std::string>& rows) {
  std::map<int, std::size_t> first;
  for (std::size_t n = 0; n < qs.size(); ++n) {
    auto [it, fresh] = first.emplace(qs[n].id, n);
    if (!fresh)
      throw ModelError(rows[n] + ": duplicate id " + std::to_string(qs[n].id) +
                       " (first defined at " + rows[it->second] + ")");
  }
}

}  // namespace

std::vector<Question> parse_bank_csv(std::istream& in, const std::string& name) {
  static constexpr const char* kColumns[] = {"id", "type", "level", "duration"};
  std::vector<Question> out;
  std::vector<std::string> rows;
  std::vector<int> column_of(4, -1);
  bool have_header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_csv(t);
    if (!have_header) {
      for (int c = 0; c < 4; ++c) {
        auto it = std::find(cells.begin(), cells.end(), kColumns[c]);
        if (it == cells.end()) fail(where, std::string("header lacks column '") + kColumns[c] + "'");
        column_of[static_cast<std::size_t>(c)] = static_cast<int>(it - cells.begin());
      }
      have_header = true;
      continue;
    }
    int values[4] = {};
    for (int c = 0; c < 4; ++c) {
      const auto col = static_cast<std::size_t>(column_of[static_cast<std::size_t>(c)]);
      if (col >= cells.size() || cells[col].empty())
        fail(where, std::string("missing attribute '") + kColumns[c] + "'");
      const std::string& cell = cells[col];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), values[c]);
      if (ec != std::errc{} || ptr != cell.data() + cell.size())
        fail(where, std::string("'") + kColumns[c] + "' is not an integer: '" + cell + "'");
    }
    if (values[3] < 1) fail(where, "duration must be positive");
    if (values[1] < 1) fail(where, "type must be >= 1");
    if (values[2] < 1) fail(where, "level must be >= 1");
    out.push_back(Question{values[0], values[1], values[2], values[3]});
    rows.push_back(where);
  }
  if (!have_header) throw ModelError(name + ": missing header id,type,level,duration");
  if (out.empty()) throw ModelError(name + ": question bank is empty");
  check_unique(out, rows);
  return out;
}

namespace {

std::vector<Question> read_bank_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = read_json_file(path);
    const json& arr = doc.is_object() && doc.contains("bank") ? doc.at("bank") : doc;
    auto qs = bank_from_json(arr, path.string() + ":/bank");
    std::vector<std::string> rows;
    for (std::size_t n = 0; n < qs.size(); ++n)
      rows.push_back(path.string() + ":/bank/" + std::to_string(n));
    check_unique(qs, rows);
    return qs;
  }
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open bank file " + path.string());
  return parse_bank_csv(in, path.string());
}

}  // namespace

QuestionBank load_bank(const std::filesystem::path& path, int q_bar, int r) {
  return QuestionBank(read_bank_file(path), q_bar, r);
}

// --- templates -------------------------------------------------------------

namespace {

void check_category(const QuestionBank& bank, int c) {
  if (c < 1 || c > bank.q_bar())
    throw ModelError("category " + std::to_string(c) + " outside 1.." +
                     std::to_string(bank.q_bar()));
}

void check_level(const QuestionBank& bank, int v) {
  if (v < 1 || v > bank.r())
    throw ModelError("level " + std::to_string(v) + " outside 1.." + std::to_string(bank.r()));
}

void check_question(const QuestionBank& bank, int id) {
  if (!bank.value_of(id)) throw ModelError("question " + std::to_string(id) + " not in the bank");
}

void check_unit(const Rational& v, const char* what) {
  if (v < Rational(0) || Rational(1) < v)
    throw ModelError(std::string(what) + " " + v.to_string() + " outside [0, 1]");
}

Scope instance_scope(std::optional<int> instance) {
  return Scope::of(instance ? InstanceRef::literal(*instance) : InstanceRef::var(0));
}

Expr per_instance(std::optional<int> instance, Expr body) {
  return instance ? body : cx::for_all_instances(std::move(body));
}

}  // namespace

Expr tmpl_share_max(const QuestionBank& bank, int instance, std::vector<int> categories,
                    Rational bound, bool strict) {
  if (categories.empty()) throw ModelError("share_max needs at least one category");
  for (int c : categories) check_category(bank, c);
  check_unit(bound, "bound");
  return cx::compare(strict ? CmpOp::lt : CmpOp::le,
                     cx::share(Scope::of(InstanceRef::literal(instance)),
                               Predicate::in(Attribute::qtype, std::move(categories))),
                     cx::constant(bound));
}

Expr tmpl_exclude_type(const QuestionBank& bank, std::optional<int> instance, int category) {
  check_category(bank, category);
  const Scope scope = instance ? Scope::of(InstanceRef::literal(*instance)) : Scope::everything();
  return cx::compare(CmpOp::eq,
                     cx::count(scope, Predicate::cmp(Attribute::qtype, CmpOp::eq, category)),
                     cx::constant(0));
}

Expr tmpl_usage_cap(const QuestionBank& bank, int question_id, int max_uses) {
  check_question(bank, question_id);
  if (max_uses < 0) throw ModelError("usage cap must be >= 0");
  return cx::compare(CmpOp::le,
                     cx::count(Scope::everything(),
                               Predicate::cmp(Attribute::id, CmpOp::eq, question_id)),
                     cx::constant(max_uses));
}

Expr tmpl_require_one_of(const QuestionBank& bank, std::vector<int> question_ids) {
  if (question_ids.empty()) throw ModelError("require_one_of needs at least one question");
  for (int id : question_ids) check_question(bank, id);
  return cx::for_all_instances(
      cx::compare(CmpOp::ge,
                  cx::count(instance_scope(std::nullopt),
                            Predicate::in(Attribute::id, std::move(question_ids))),
                  cx::constant(1)));
}

Expr tmpl_min_level(const QuestionBank& bank, int level) {
  check_level(bank, level);
  return cx::for_all_slots(Scope::everything(),
                           Predicate::cmp(Attribute::level, CmpOp::ge, level));
}

Expr tmpl_min_type_count(const QuestionBank& bank, int l, int category, int n) {
  check_category(bank, category);
  if (n < 0) throw ModelError("minimum count must be >= 0");
  if (n > l)
    throw ModelError("minimum count " + std::to_string(n) + " exceeds l = " + std::to_string(l));
  return cx::for_all_instances(
      cx::compare(CmpOp::ge,
                  cx::count(instance_scope(std::nullopt),
                            Predicate::cmp(Attribute::qtype, CmpOp::eq, category)),
                  cx::constant(n)));
}

Expr tmpl_duration(std::optional<int> instance, int lo, int hi) {
  if (lo > hi)
    throw ModelError("duration band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] is empty");
  const Term total = cx::sum(instance_scope(instance), Attribute::duration);
  Expr body = lo == hi ? cx::compare(CmpOp::eq, total, cx::constant(lo))
                       : cx::all_of({cx::compare(CmpOp::ge, total, cx::constant(lo)),
                                     cx::compare(CmpOp::le, total, cx::constant(hi))});
  return per_instance(instance, std::move(body));
}

Expr tmpl_share_range(const QuestionBank& bank, std::optional<int> instance, int level,
                      Rational lo, Rational hi, bool strict) {
  check_level(bank, level);
  check_unit(lo, "lower share");
  check_unit(hi, "upper share");
  if (hi < lo) throw ModelError("share range lower end exceeds upper end");
  const Term share =
      cx::share(instance_scope(instance), Predicate::cmp(Attribute::level, CmpOp::eq, level));
  Expr body = cx::all_of({cx::compare(strict ? CmpOp::gt : CmpOp::ge, share, cx::constant(lo)),
                          cx::compare(strict ? CmpOp::lt : CmpOp::le, share, cx::constant(hi))});
  return per_instance(instance, std::move(body));
}

Expr tmpl_unique_per_exam(const QuestionBank& bank, int l) {
  if (l > bank.p())
    throw ModelError("l exceeds p under uniqueness (l = " + std::to_string(l) +
                     ", p = " + std::to_string(bank.p()) + ")");
  return cx::for_all_instances(cx::all_different(InstanceRef::var(0)));
}

std::optional<OverlapDirection> parse_overlap_direction(std::string_view s) {
  if (s == "at_most") return OverlapDirection::at_most;
  if (s == "at_least") return OverlapDirection::at_least;
  return std::nullopt;
}

std::string_view to_string(OverlapDirection d) {
  return d == OverlapDirection::at_most ? "at_most" : "at_least";
}

Expr tmpl_pairwise_overlap(OverlapDirection direction, Rational bound, int l) {
  check_unit(bound, "overlap bound");
  return cx::pairwise_instances(
      cx::compare(direction == OverlapDirection::at_most ? CmpOp::le : CmpOp::ge,
                  cx::overlap(InstanceRef::var(0), InstanceRef::var(1)),
                  cx::constant(bound * Rational(l))));
}

namespace {

constexpr std::pair<TemplateTag, std::string_view> kTags[] = {
    {TemplateTag::share_max, "share_max"},
    {TemplateTag::exclude_type, "exclude_type"},
    {TemplateTag::usage_cap, "usage_cap"},
    {TemplateTag::require_one_of, "require_one_of"},
    {TemplateTag::min_level, "min_level"},
    {TemplateTag::min_type_count, "min_type_count"},
    {TemplateTag::duration, "duration"},
    {TemplateTag::share_range, "share_range"},
    {TemplateTag::unique_per_exam, "unique_per_exam"},
    {TemplateTag::pairwise_overlap, "pairwise_overlap"},
};

}  // namespace

std::string_view to_string(TemplateTag t) {
  for (const auto& [tag, name] : kTags)
    if (tag == t) return name;
  return "?";
}

std::optional<TemplateTag> parse_template_tag(std::string_view s) {
  for (const auto& [tag, name] : kTags)
    if (name == s) return tag;
  return std::nullopt;
}

std::string Provenance::describe() const {
  std::string out = id + " [";
  out += requirement ? "requirement" : "constraint";
  out += ", " + owner.to_string();
  if (tag) {
    out += ", ";
    out += to_string(*tag);
    if (!params.is_null() && !params.empty()) out += " " + params.dump();
  } else {
    out += ", expression";
  }
  out += "]";
  if (!label.empty()) out += " " + label;
  return out;
}

const Provenance* ExamModel::provenance_of(std::string_view id) const {
  for (const auto& p : provenance)
    if (p.id == id) return &p;
  return nullptr;
}

// --- model files -----------------------------------------------------------

namespace {

class ParamReader {
 public:
  ParamReader(const json& params, std::string where) : p_(params), where_(std::move(where)) {
    if (!p_.is_object()) fail(where_, "params must be an object");
  }

  const json& at(const char* key) const {
    auto it = p_.find(key);
    if (it == p_.end()) fail(where_, std::string("missing parameter '") + key + "'");
    return *it;
  }
  bool has(const char* key) const { return p_.contains(key); }

  int integer(const char* key) const {
    const json& j = at(key);
    if (!j.is_number_integer()) fail(path(key), "expected an integer");
    return j.get<int>();
  }
  std::vector<int> integers(const char* key) const {
    const json& j = at(key);
    if (!j.is_array()) fail(path(key), "expected an array of integers");
    std::vector<int> out;
    for (const auto& v : j) {
      if (!v.is_number_integer()) fail(path(key), "expected an array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  }
  Rational rational(const char* key) const { return rational_from_json(at(key), path(key)); }
  bool flag(const char* key) const {
    if (!has(key)) return false;
    if (!p_.at(key).is_boolean()) fail(path(key), "expected true or false");
    return p_.at(key).get<bool>();
  }
  // Absent or "all" means every instance.
  std::optional<int> instance() const {
    if (!has("instance")) return std::nullopt;
    const json& j = p_.at("instance");
    if (j.is_string() && j.get<std::string>() == "all") return std::nullopt;
    return integer("instance");
  }
  std::string path(const char* key) const { return where_ + "/" + key; }

 private:
  const json& p_;
  std::string where_;
};

struct Expanded {
  Expr expr;
  std::optional<int> instance;
};

Expanded expand(TemplateTag tag, const ParamReader& p, const QuestionBank& bank, int l) {
  switch (tag) {
    case TemplateTag::share_max: {
      const int i = p.integer("instance");
      return {tmpl_share_max(bank, i, p.integers("categories"), p.rational("bound"),
                             p.flag("strict")), i};
    }
    case TemplateTag::exclude_type: {
      const auto i = p.instance();
      return {tmpl_exclude_type(bank, i, p.integer("category")), i};
    }
    case TemplateTag::usage_cap:
      return {tmpl_usage_cap(bank, p.integer("question"), p.integer("max")), {}};
    case TemplateTag::require_one_of:
      return {tmpl_require_one_of(bank, p.integers("questions")), {}};
    case TemplateTag::min_level:
      return {tmpl_min_level(bank, p.integer("level")), {}};
    case TemplateTag::min_type_count:
      return {tmpl_min_type_count(bank, l, p.integer("category"), p.integer("min")), {}};
    case TemplateTag::duration: {
      const auto i = p.instance();
      const int lo = p.has("equals") ? p.integer("equals") : p.integer("lo");
      const int hi = p.has("equals") ? lo : p.integer("hi");
      return {tmpl_duration(i, lo, hi), i};
    }
    case TemplateTag::share_range: {
      const auto i = p.instance();
      return {tmpl_share_range(bank, i, p.integer("level"), p.rational("lo"), p.rational("hi"),
                               p.flag("strict")), i};
    }
    case TemplateTag::unique_per_exam:
      return {tmpl_unique_per_exam(bank, l), {}};
    case TemplateTag::pairwise_overlap: {
      const auto& d = p.at("direction");
      const auto dir = d.is_string() ? parse_overlap_direction(d.get<std::string>()) : std::nullopt;
      if (!dir) fail(p.path("direction"), "expected \"at_most\" or \"at_least\"");
      return {tmpl_pairwise_overlap(*dir, p.rational("bound"), l), {}};
    }
  }
  throw ModelError("unknown template");
}

// Empty integer bands for share ranges make the task unsatisfiable; say so
// up front rather than leave it to the solver.
std::optional<std::string> share_range_warning(const std::string& id, const ParamReader& p,
                                               int l) {
  const bool strict = p.flag("strict");
  const Rational lo = p.rational("lo");
  const Rational hi = p.rational("hi");
  const auto a = share_band(strict ? CmpOp::gt : CmpOp::ge, lo, l);
  const auto b = share_band(strict ? CmpOp::lt : CmpOp::le, hi, l);
  const std::int64_t from = std::max(a->lo, b->lo);
  const std::int64_t to = std::min(a->hi, b->hi);
  if (from <= to) return std::nullopt;
  return "template '" + id + "' (share_range): no integer count c with " + lo.to_string() +
         " <= c/" + std::to_string(l) + " <= " + hi.to_string() + "; the band [" +
         (lo * Rational(l)).to_string() + ", " + (hi * Rational(l)).to_string() +
         "] holds no integer, so every exam violates it";
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

}  // namespace

ExamModel compile_exam_model(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("/", "model document must be a JSON object");
  ExamModel m;
  const auto& inst = doc.contains("instances") ? doc.at("instances") : json();
  if (!inst.is_object()) fail("/instances", "expected an object {k, l}");
  for (const char* key : {"k", "l"})
    if (!inst.contains(key) || !inst.at(key).is_number_integer())
      fail(std::string("/instances/") + key, "expected an integer");
  m.k = inst.at("k").get<int>();
  m.l = inst.at("l").get<int>();
  if (m.k < 1 || m.l < 1) fail("/instances", "k and l must be >= 1");
  int sizes[2] = {0, 0};
  for (int n = 0; n < 2; ++n) {
    const char* key = n == 0 ? "categories" : "levels";
    if (!doc.contains(key)) continue;
    if (!doc.at(key).is_number_integer()) fail(std::string("/") + key, "expected an integer");
    sizes[n] = doc.at(key).get<int>();
  }
  const int q_bar = sizes[0];
  const int r = sizes[1];

  if (!doc.contains("bank")) fail("/", "missing field 'bank'");
  const json& bank_json = doc.at("bank");
  std::vector<Question> questions;
  if (bank_json.is_object() && bank_json.contains("csv")) {
    questions = read_bank_file(base_dir / as_string(bank_json.at("csv"), "/bank/csv"));
  } else {
    questions = bank_from_json(bank_json, "/bank");
    std::vector<std::string> rows;
    for (std::size_t n = 0; n < questions.size(); ++n) rows.push_back("/bank/" + std::to_string(n));
    check_unique(questions, rows);
  }
  m.bank = std::make_shared<const QuestionBank>(std::move(questions), q_bar, r);

  std::vector<Requirement> reqs;
  std::vector<NamedConstraint> cons;
  if (doc.contains("requirements")) reqs = requirements_from_json(doc.at("requirements"));
  if (doc.contains("constraints")) cons = constraints_from_json(doc.at("constraints"));
  std::vector<Provenance> req_prov;
  std::vector<Provenance> con_prov;
  for (const auto& q : reqs) req_prov.push_back({q.id, true, q.owner, {}, {}, q.label});
  for (const auto& c : cons)
    con_prov.push_back({c.id, false, Owner::instructor(), {}, {}, c.label});

  if (doc.contains("templates")) {
    const json& arr = doc.at("templates");
    if (!arr.is_array()) fail("/templates", "expected an array");
    for (std::size_t n = 0; n < arr.size(); ++n) {
      const std::string at = "/templates/" + std::to_string(n);
      const json& t = arr[n];
      if (!t.is_object()) fail(at, "expected an object");
      if (!t.contains("id")) fail(at, "missing field 'id'");
      if (!t.contains("tag")) fail(at, "missing field 'tag'");
      Provenance prov;
      prov.id = as_string(t.at("id"), at + "/id");
      const std::string tag_name = as_string(t.at("tag"), at + "/tag");
      const auto tag = parse_template_tag(tag_name);
      if (!tag) fail(at + "/tag", "unknown template '" + tag_name + "'");
      prov.tag = tag;
      prov.params = t.contains("params") ? t.at("params") : json::object();
      prov.label = t.value("label", "");
      const ParamReader params(prov.params, at + "/params");
      Expanded e;
      try {
        e = expand(*tag, params, *m.bank, m.l);
      } catch (const ModelError& err) {
        const std::string what = err.what();
        throw ModelError(what.starts_with("/") ? what : at + ": " + what);
      }

      // Examinee-scoped preferences default to requirements of that
      // examinee; everything else defaults to an instructor constraint.
      const bool examinee_pref =
          (*tag == TemplateTag::share_max || *tag == TemplateTag::exclude_type) && e.instance;
      std::string role = examinee_pref ? "requirement" : "constraint";
      if (t.contains("role")) role = as_string(t.at("role"), at + "/role");
      if (role != "requirement" && role != "constraint")
        fail(at + "/role", "expected \"requirement\" or \"constraint\"");
      prov.requirement = role == "requirement";
      prov.owner = examinee_pref ? Owner::examinee(*e.instance) : Owner::instructor();
      if (t.contains("owner")) prov.owner = owner_from_json(t.at("owner"), at + "/owner");

      if (*tag == TemplateTag::share_range)
        if (auto w = share_range_warning(prov.id, params, m.l)) m.warnings.push_back(*w);

      if (prov.requirement) {
        reqs.push_back(Requirement{prov.id, prov.owner, e.expr, prov.label});
        req_prov.push_back(std::move(prov));
      } else {
        cons.push_back(NamedConstraint{prov.id, e.expr, prov.label});
        con_prov.push_back(std::move(prov));
      }
    }
  }
  m.task = build_task(m.bank, m.k, m.l, std::move(reqs), std::move(cons));
  m.provenance = std::move(req_prov);
  m.provenance.insert(m.provenance.end(), con_prov.begin(), con_prov.end());
  return m;
}

ExamModel load_exam_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    return compile_exam_model(doc, path.parent_path());
  } catch (const ModelError& e) {
    throw ModelError(path.string() + ":" + e.what());
  }
}

// --- reports ---------------------------------------------------------------

ExamReport report(const MultiConfiguration& conf, const MultiConfigTask& task) {
  if (conf.k() != task.k() || conf.l() != task.l())
    throw VerificationError("solution shape " + std::to_string(conf.k()) + "x" +
                            std::to_string(conf.l()) + " does not match the model");
  for (int v : conf.ids())
    if (v < 1 || v > task.bank().p())
      throw VerificationError("solution uses a question outside the bank");
  if (auto bad = first_violation(conf, task))
    throw VerificationError("solution violates constraint '" + *bad + "'");

  const QuestionBank& bank = task.bank();
  ExamReport r;
  r.k = task.k();
  r.l = task.l();
  std::vector<std::vector<int>> counts(static_cast<std::size_t>(r.k),
                                       std::vector<int>(static_cast<std::size_t>(bank.p()), 0));
  for (int i = 1; i <= r.k; ++i) {
    std::int64_t total = 0;
    std::vector<int> types(static_cast<std::size_t>(bank.q_bar()), 0);
    std::vector<int> levels(static_cast<std::size_t>(bank.r()), 0);
    for (int v : conf.exam(i)) {
      const Question& q = bank.question(v);
      total += q.duration;
      ++types[static_cast<std::size_t>(q.qtype - 1)];
      ++levels[static_cast<std::size_t>(q.level - 1)];
      ++counts[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(v - 1)];
    }
    r.durations.push_back(total);
    r.type_histogram.push_back(std::move(types));
    r.level_histogram.push_back(std::move(levels));
  }
  r.overlap.assign(static_cast<std::size_t>(r.k), std::vector<int>(static_cast<std::size_t>(r.k)));
  for (std::size_t a = 0; a < counts.size(); ++a)
    for (std::size_t b = 0; b < counts.size(); ++b)
      for (std::size_t v = 0; v < counts[a].size(); ++v)
        r.overlap[a][b] += std::min(counts[a][v], counts[b][v]);
  for (int v = 1; v <= bank.p(); ++v) {
    int uses = 0;
    for (const auto& c : counts) uses += c[static_cast<std::size_t>(v - 1)];
    r.usage.emplace_back(bank.question(v).id, uses);
  }
  return r;
}

std::vector<ExamReport> report(std::span<const MultiConfiguration> solutions,
                               const MultiConfigTask& task) {
  std::vector<ExamReport> out;
  for (const auto& s : solutions) out.push_back(report(s, task));
  return out;
}

json to_json(const ExamReport& r) {
  json exams = json::array();
  for (int i = 0; i < r.k; ++i) {
    const auto n = static_cast<std::size_t>(i);
    exams.push_back({{"examinee", i + 1},
                     {"duration", r.durations[n]},
                     {"types", r.type_histogram[n]},
                     {"levels", r.level_histogram[n]}});
  }
  json usage = json::array();
  for (const auto& [id, uses] : r.usage)
    if (uses > 0) usage.push_back({{"question", id}, {"uses", uses}});
  return {{"k", r.k}, {"l", r.l}, {"exams", exams}, {"overlap", r.overlap}, {"usage", usage}};
}

std::string format_report(const ExamReport& r) {
  std::ostringstream out;
  const auto row = [&](const std::vector<int>& v) {
    for (std::size_t n = 0; n < v.size(); ++n) out << (n ? " " : "") << v[n];
  };
  out << "examinee  duration  types | levels\n";
  for (int i = 0; i < r.k; ++i) {
    const auto n = static_cast<std::size_t>(i);
    out << "  " << (i + 1) << "  " << r.durations[n] << "  ";
    row(r.type_histogram[n]);
    out << " | ";
    row(r.level_histogram[n]);
    out << "\n";
  }
  out << "overlap\n";
  for (const auto& line : r.overlap) {
    out << "  ";
    row(line);
    out << "\n";
  }
  out << "usage (question:uses)\n ";
  for (const auto& [id, uses] : r.usage)
    if (uses > 0) out << " " << id << ":" << uses;
  out << "\n";
  return out.str();
}

}  // namespace multiconf
