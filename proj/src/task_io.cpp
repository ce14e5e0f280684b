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

#include "multiconf/task_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "multiconf/error.hpp"

namespace multiconf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ModelError((where.empty() ? std::string("/") : where) + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) fail(where, "integer out of range");
  return static_cast<int>(v);
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Attribute attribute_of(const json& j, const std::string& where) {
  auto a = parse_attribute(as_string(j, where));
  if (!a) fail(where, "unknown attribute '" + j.get<std::string>() + "'");
  return *a;
}

CmpOp cmp_of(const json& j, const std::string& where) {
  auto op = parse_cmp_op(as_string(j, where));
  if (!op) fail(where, "unknown comparison '" + j.get<std::string>() + "'");
  return *op;
}

}  // namespace

Rational rational_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_float()) {
      // Shortest round-trip text of the double is the literal as authored.
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, j.get<double>());
      if (ec != std::errc{}) fail(where, "bad number");
      std::string text(buf, ptr);
      if (text.find('e') != std::string::npos || text.find('E') != std::string::npos)
        fail(where, "exponent notation not supported for exact rationals; use \"a/b\"");
      return Rational::parse(text);
    }
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  fail(where, "expected a number or a rational string like \"3/10\"");
}

json to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_string();
}

InstanceRef instance_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return InstanceRef::literal(as_int(j, where));
  if (j.is_object() && j.contains("bound"))
    return InstanceRef::var(as_int(j.at("bound"), where + "/bound"));
  fail(where, "expected an instance index or {\"bound\": depth}");
}

json to_json(const InstanceRef& r) {
  if (r.bound) return json{{"bound", r.value}};
  return r.value;
}

Scope scope_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "all") return Scope::everything();
    fail(where, "unknown scope '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) fail(where, "expected a scope");
  if (j.contains("slot")) {
    return Scope::single_slot(instance_from_json(field(j, "instance", where), where + "/instance"),
                              as_int(j.at("slot"), where + "/slot"));
  }
  if (j.contains("instance"))
    return Scope::of(instance_from_json(j.at("instance"), where + "/instance"));
  if (j.contains("instances")) {
    const auto& arr = j.at("instances");
    if (!arr.is_array()) fail(where + "/instances", "expected an array");
    std::vector<InstanceRef> refs;
    for (std::size_t n = 0; n < arr.size(); ++n)
      refs.push_back(instance_from_json(arr[n], where + "/instances/" + std::to_string(n)));
    return Scope::of(std::move(refs));
  }
  fail(where, "scope needs 'instance', 'instances', 'slot' or the string \"all\"");
}

json to_json(const Scope& s) {
  switch (s.kind) {
    case Scope::Kind::all: return "all";
    case Scope::Kind::slot:
      return json{{"instance", to_json(s.instances.front())}, {"slot", s.slot}};
    case Scope::Kind::instances:
      if (s.instances.size() == 1) return json{{"instance", to_json(s.instances.front())}};
      {
        json arr = json::array();
        for (const auto& r : s.instances) arr.push_back(to_json(r));
        return json{{"instances", arr}};
      }
  }
  return nullptr;
}

Predicate predicate_from_json(const json& j, const std::string& where) {
  const Attribute a = attribute_of(field(j, "attr", where), where + "/attr");
  if (j.contains("in")) {
    const auto& arr = j.at("in");
    if (!arr.is_array() || arr.empty()) fail(where + "/in", "expected a non-empty array");
    std::vector<int> values;
    for (std::size_t n = 0; n < arr.size(); ++n)
      values.push_back(as_int(arr[n], where + "/in/" + std::to_string(n)));
    return Predicate::in(a, std::move(values));
  }
  return Predicate::cmp(a, cmp_of(field(j, "cmp", where), where + "/cmp"),
                        as_int(field(j, "value", where), where + "/value"));
}

json to_json(const Predicate& p) {
  json j{{"attr", std::string(to_string(p.attr))}};
  if (p.members) {
    j["in"] = *p.members;
  } else {
    j["cmp"] = std::string(to_string(p.op));
    j["value"] = p.literal;
  }
  return j;
}

Term term_from_json(const json& j, const std::string& where) {
  if (j.is_number() || j.is_string()) return term::Const{rational_from_json(j, where)};
  const std::string kind = as_string(field(j, "term", where), where + "/term");
  if (kind == "const") return term::Const{rational_from_json(field(j, "value", where), where + "/value")};
  if (kind == "count")
    return term::Count{scope_from_json(field(j, "scope", where), where + "/scope"),
                       predicate_from_json(field(j, "pred", where), where + "/pred")};
  if (kind == "share")
    return term::Share{scope_from_json(field(j, "scope", where), where + "/scope"),
                       predicate_from_json(field(j, "pred", where), where + "/pred")};
  if (kind == "sum")
    return term::Sum{scope_from_json(field(j, "scope", where), where + "/scope"),
                     attribute_of(field(j, "attr", where), where + "/attr")};
  if (kind == "overlap")
    return term::Overlap{instance_from_json(field(j, "a", where), where + "/a"),
                         instance_from_json(field(j, "b", where), where + "/b")};
  if (kind == "slot")
    return term::SlotAttr{instance_from_json(field(j, "instance", where), where + "/instance"),
                          as_int(field(j, "slot", where), where + "/slot"),
                          attribute_of(field(j, "attr", where), where + "/attr")};
  fail(where + "/term", "unknown term kind '" + kind + "'");
}

json to_json(const Term& t) {
  return std::visit(
      overloaded{
          [](const term::Const& c) { return json{{"term", "const"}, {"value", to_json(c.value)}}; },
          [](const term::Count& c) {
            return json{{"term", "count"}, {"scope", to_json(c.scope)}, {"pred", to_json(c.pred)}};
          },
          [](const term::Share& c) {
            return json{{"term", "share"}, {"scope", to_json(c.scope)}, {"pred", to_json(c.pred)}};
          },
          [](const term::Sum& s) {
            return json{{"term", "sum"},
                        {"scope", to_json(s.scope)},
                        {"attr", std::string(to_string(s.attr))}};
          },
          [](const term::Overlap& o) {
            return json{{"term", "overlap"}, {"a", to_json(o.a)}, {"b", to_json(o.b)}};
          },
          [](const term::SlotAttr& s) {
            return json{{"term", "slot"},
                        {"instance", to_json(s.instance)},
                        {"slot", s.slot},
                        {"attr", std::string(to_string(s.attr))}};
          },
      },
      t);
}

Expr expr_from_json(const json& j, const std::string& where) {
  if (j.is_boolean()) return cx::truth(j.get<bool>());
  const std::string op = as_string(field(j, "op", where), where + "/op");
  auto args = [&]() {
    const auto& arr = field(j, "args", where);
    if (!arr.is_array()) fail(where + "/args", "expected an array");
    std::vector<Expr> out;
    for (std::size_t n = 0; n < arr.size(); ++n)
      out.push_back(expr_from_json(arr[n], where + "/args/" + std::to_string(n)));
    return out;
  };
  if (op == "true") return cx::truth(true);
  if (op == "false") return cx::truth(false);
  if (op == "compare")
    return cx::compare(cmp_of(field(j, "cmp", where), where + "/cmp"),
                       term_from_json(field(j, "lhs", where), where + "/lhs"),
                       term_from_json(field(j, "rhs", where), where + "/rhs"));
  if (op == "and") return cx::all_of(args());
  if (op == "or") return cx::any_of(args());
  if (op == "not") return cx::negate(expr_from_json(field(j, "arg", where), where + "/arg"));
  if (op == "forall_instances")
    return cx::for_all_instances(expr_from_json(field(j, "body", where), where + "/body"));
  if (op == "pairwise_instances")
    return cx::pairwise_instances(expr_from_json(field(j, "body", where), where + "/body"));
  if (op == "forall_slots")
    return cx::for_all_slots(scope_from_json(field(j, "scope", where), where + "/scope"),
                             predicate_from_json(field(j, "pred", where), where + "/pred"));
  if (op == "all_different")
    return cx::all_different(instance_from_json(field(j, "instance", where), where + "/instance"));
  fail(where + "/op", "unknown expression op '" + op + "'");
}

json to_json(const Expr& e) {
  auto list = [](const std::vector<Expr>& xs) {
    json arr = json::array();
    for (const auto& x : xs) arr.push_back(to_json(x));
    return arr;
  };
  return std::visit(
      overloaded{
          [](const node::Literal& l) { return json{{"op", l.value ? "true" : "false"}}; },
          [](const node::Compare& c) {
            return json{{"op", "compare"},
                        {"cmp", std::string(to_string(c.op))},
                        {"lhs", to_json(c.lhs)},
                        {"rhs", to_json(c.rhs)}};
          },
          [&](const node::And& a) { return json{{"op", "and"}, {"args", list(a.args)}}; },
          [&](const node::Or& o) { return json{{"op", "or"}, {"args", list(o.args)}}; },
          [](const std::shared_ptr<const node::Not>& n) {
            return json{{"op", "not"}, {"arg", to_json(n->arg)}};
          },
          [](const std::shared_ptr<const node::ForAllInstances>& f) {
            return json{{"op", "forall_instances"}, {"body", to_json(f->body)}};
          },
          [](const std::shared_ptr<const node::PairwiseInstances>& p) {
            return json{{"op", "pairwise_instances"}, {"body", to_json(p->body)}};
          },
          [](const node::ForAllSlots& f) {
            return json{{"op", "forall_slots"}, {"scope", to_json(f.scope)}, {"pred", to_json(f.pred)}};
          },
          [](const node::AllDifferentSlots& a) {
            return json{{"op", "all_different"}, {"instance", to_json(a.instance)}};
          },
      },
      e.node());
}

Owner owner_from_json(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "instructor") return Owner::instructor();
  if (j.is_object() && j.contains("examinee"))
    return Owner::examinee(as_int(j.at("examinee"), where + "/examinee"));
  fail(where, "owner must be \"instructor\" or {\"examinee\": i}");
}

json to_json(const Owner& o) {
  if (o.kind == Owner::Kind::instructor) return "instructor";
  return json{{"examinee", o.instance}};
}

std::vector<Question> bank_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of questions");
  std::vector<Question> out;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string at = where + "/" + std::to_string(n);
    const auto& row = j[n];
    Question q;
    q.id = as_int(field(row, "id", at), at + "/id");
    q.qtype = as_int(field(row, "type", at), at + "/type");
    q.level = as_int(field(row, "level", at), at + "/level");
    q.duration = as_int(field(row, "duration", at), at + "/duration");
    if (q.duration < 1) fail(at + "/duration", "duration must be positive");
    out.push_back(q);
  }
  return out;
}

std::vector<Requirement> requirements_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array");
  std::vector<Requirement> reqs;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const std::string at = where + "/" + std::to_string(n);
    Requirement req;
    req.id = as_string(field(arr[n], "id", at), at + "/id");
    req.owner = arr[n].contains("owner") ? owner_from_json(arr[n].at("owner"), at + "/owner")
                                         : Owner::instructor();
    req.expr = expr_from_json(field(arr[n], "expr", at), at + "/expr");
    req.label = arr[n].value("label", "");
    reqs.push_back(std::move(req));
  }
  return reqs;
}

std::vector<NamedConstraint> constraints_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array");
  std::vector<NamedConstraint> cons;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const std::string at = where + "/" + std::to_string(n);
    NamedConstraint c;
    c.id = as_string(field(arr[n], "id", at), at + "/id");
    c.expr = expr_from_json(field(arr[n], "expr", at), at + "/expr");
    c.label = arr[n].value("label", "");
    cons.push_back(std::move(c));
  }
  return cons;
}

MultiConfigTask task_from_json(const json& doc) {
  if (!doc.is_object()) fail("", "task document must be a JSON object");
  const auto& inst = field(doc, "instances", "");
  const int k = as_int(field(inst, "k", "/instances"), "/instances/k");
  const int l = as_int(field(inst, "l", "/instances"), "/instances/l");
  int q_bar = 0;
  int r = 0;
  if (doc.contains("categories")) q_bar = as_int(doc.at("categories"), "/categories");
  if (doc.contains("levels")) r = as_int(doc.at("levels"), "/levels");
  auto bank = std::make_shared<const QuestionBank>(bank_from_json(field(doc, "bank", ""), "/bank"),
                                                   q_bar, r);

  std::vector<Requirement> reqs;
  if (doc.contains("requirements")) reqs = requirements_from_json(doc.at("requirements"));
  std::vector<NamedConstraint> cons;
  if (doc.contains("constraints")) cons = constraints_from_json(doc.at("constraints"));
  return build_task(std::move(bank), k, l, std::move(reqs), std::move(cons));
}

json task_to_json(const MultiConfigTask& task) {
  json bank = json::array();
  for (const auto& q : task.bank().questions())
    bank.push_back({{"id", q.id}, {"type", q.qtype}, {"level", q.level}, {"duration", q.duration}});
  json reqs = json::array();
  for (const auto& r : task.requirements()) {
    json j{{"id", r.id}, {"owner", to_json(r.owner)}, {"expr", to_json(r.expr)}};
    if (!r.label.empty()) j["label"] = r.label;
    reqs.push_back(std::move(j));
  }
  json cons = json::array();
  for (const auto& c : task.constraints()) {
    json j{{"id", c.id}, {"expr", to_json(c.expr)}};
    if (!c.label.empty()) j["label"] = c.label;
    cons.push_back(std::move(j));
  }
  return json{{"bank", bank},
              {"categories", task.bank().q_bar()},
              {"levels", task.bank().r()},
              {"instances", {{"k", task.k()}, {"l", task.l()}}},
              {"requirements", reqs},
              {"constraints", cons}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t n = 0; n + 1 < e.byte && n < text.size(); ++n) {
      if (text[n] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ModelError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": JSON syntax error: " + e.what());
  }
}

}  // namespace multiconf
