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

#include "multiconf/model.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_set>

#include "multiconf/error.hpp"

namespace multiconf {

// ---------------------------------------------------------------------------
// Rational

Rational Rational::from_wide(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  constexpr __int128 kMax = INT64_MAX;
  if (n > kMax || n < -kMax || d > kMax) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) fail();
    return v;
  };
  if (text.empty()) return fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text));
  const bool negative = text.front() == '-';
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 17) return fail();
  for (char c : frac)
    if (c < '0' || c > '9') return fail();
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::int64_t w = (whole.empty() || whole == "-") ? 0 : parse_int(whole);
  const std::int64_t f = parse_int(frac);
  Rational r = Rational(w < 0 ? -w : w) + Rational(f, den);
  return negative ? Rational(-r.num(), r.den()) : r;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Attribute a) {
  switch (a) {
    case Attribute::id: return "id";
    case Attribute::qtype: return "type";
    case Attribute::level: return "level";
    case Attribute::duration: return "duration";
  }
  return "?";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::le: return "<=";
    case CmpOp::lt: return "<";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  return "?";
}

std::optional<Attribute> parse_attribute(std::string_view s) {
  if (s == "id") return Attribute::id;
  if (s == "type" || s == "qtype") return Attribute::qtype;
  if (s == "level") return Attribute::level;
  if (s == "duration") return Attribute::duration;
  return std::nullopt;
}

std::optional<CmpOp> parse_cmp_op(std::string_view s) {
  if (s == "<=") return CmpOp::le;
  if (s == "<") return CmpOp::lt;
  if (s == "==" || s == "=") return CmpOp::eq;
  if (s == "!=") return CmpOp::ne;
  if (s == ">") return CmpOp::gt;
  if (s == ">=") return CmpOp::ge;
  return std::nullopt;
}

bool compare(CmpOp op, const Rational& lhs, const Rational& rhs) {
  switch (op) {
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
  }
  return false;
}

std::optional<CountBand> count_band(CmpOp op, const Rational& bound, std::int64_t n) {
  CountBand b{0, n};
  switch (op) {
    case CmpOp::le: b.hi = std::min(n, bound.floor()); break;
    case CmpOp::lt: b.hi = std::min(n, bound.ceil() - 1); break;
    case CmpOp::ge: b.lo = std::max<std::int64_t>(0, bound.ceil()); break;
    case CmpOp::gt: b.lo = std::max<std::int64_t>(0, bound.floor() + 1); break;
    case CmpOp::eq:
      if (!bound.is_integer()) return CountBand{1, 0};
      b.lo = std::max<std::int64_t>(0, bound.num());
      b.hi = std::min(n, bound.num());
      break;
    case CmpOp::ne: return std::nullopt;
  }
  return b;
}

std::optional<CountBand> share_band(CmpOp op, const Rational& bound, std::int64_t n) {
  return count_band(op, bound * Rational(n), n);
}

std::string Owner::to_string() const {
  return kind == Kind::instructor ? "instructor" : "examinee " + std::to_string(instance);
}

// ---------------------------------------------------------------------------
// Bank

QuestionBank::QuestionBank(std::vector<Question> questions, int q_bar, int r)
    : questions_(std::move(questions)) {
  if (questions_.empty()) throw ModelError("question bank is empty");
  int max_type = 0;
  int max_level = 0;
  for (std::size_t n = 0; n < questions_.size(); ++n) {
    const auto& q = questions_[n];
    const std::string name = "question " + std::to_string(q.id);
    if (q.qtype < 1) throw ModelError(name + ": type must be >= 1");
    if (q.level < 1) throw ModelError(name + ": level must be >= 1");
    if (q.duration < 1) throw ModelError(name + ": duration must be >= 1");
    by_id_.emplace_back(q.id, static_cast<int>(n) + 1);
    max_type = std::max(max_type, q.qtype);
    max_level = std::max(max_level, q.level);
  }
  std::sort(by_id_.begin(), by_id_.end());
  for (std::size_t n = 1; n < by_id_.size(); ++n)
    if (by_id_[n].first == by_id_[n - 1].first)
      throw ModelError("duplicate question id " + std::to_string(by_id_[n].first));
  q_bar_ = q_bar == 0 ? max_type : q_bar;
  r_ = r == 0 ? max_level : r;
  if (q_bar_ < max_type)
    throw ModelError("category count " + std::to_string(q_bar_) + " below observed type " +
                     std::to_string(max_type));
  if (r_ < max_level)
    throw ModelError("level count " + std::to_string(r_) + " below observed level " +
                     std::to_string(max_level));
}

std::optional<int> QuestionBank::value_of(int id) const {
  auto it = std::lower_bound(by_id_.begin(), by_id_.end(), std::pair{id, 0});
  if (it == by_id_.end() || it->first != id) return std::nullopt;
  return it->second;
}

bool QuestionBank::remapped() const {
  for (std::size_t n = 0; n < questions_.size(); ++n)
    if (questions_[n].id != static_cast<int>(n) + 1) return true;
  return false;
}

bool Predicate::holds(const Question& q) const {
  const int v = q.attribute(attr);
  if (members) return std::find(members->begin(), members->end(), v) != members->end();
  return compare(op, v, literal);
}

// ---------------------------------------------------------------------------
// Configuration

MultiConfiguration::MultiConfiguration(int k, int l, std::vector<int> ids)
    : k_(k), l_(l), ids_(std::move(ids)) {
  if (k < 1 || l < 1 || ids_.size() != static_cast<std::size_t>(k * l))
    throw std::invalid_argument("configuration is not total over k*l slots");
}

// ---------------------------------------------------------------------------
// Task

std::vector<NamedConstraint> MultiConfigTask::all_constraints() const {
  std::vector<NamedConstraint> out;
  out.reserve(requirements_.size() + constraints_.size());
  for (const auto& r : requirements_) out.push_back({r.id, r.expr, r.label});
  out.insert(out.end(), constraints_.begin(), constraints_.end());
  return out;
}

std::vector<std::string> MultiConfigTask::all_ids() const {
  std::vector<std::string> out;
  for (const auto& r : requirements_) out.push_back(r.id);
  for (const auto& c : constraints_) out.push_back(c.id);
  return out;
}

const Expr* MultiConfigTask::find(std::string_view id) const {
  for (const auto& r : requirements_)
    if (r.id == id) return &r.expr;
  for (const auto& c : constraints_)
    if (c.id == id) return &c.expr;
  return nullptr;
}

bool MultiConfigTask::is_requirement(std::string_view id) const {
  return std::any_of(requirements_.begin(), requirements_.end(),
                     [&](const Requirement& r) { return r.id == id; });
}

bool MultiConfigTask::any_unique() const {
  return std::find(unique_.begin(), unique_.end(), true) != unique_.end();
}

MultiConfigTask MultiConfigTask::restricted_to(std::span<const std::string> ids) const {
  std::set<std::string, std::less<>> wanted(ids.begin(), ids.end());
  for (const auto& id : wanted)
    if (find(id) == nullptr) throw ModelError("unknown constraint id '" + id + "'");
  MultiConfigTask t;
  t.bank_ = bank_;
  t.k_ = k_;
  t.l_ = l_;
  for (const auto& r : requirements_)
    if (wanted.contains(r.id)) t.requirements_.push_back(r);
  for (const auto& c : constraints_)
    if (wanted.contains(c.id)) t.constraints_.push_back(c);
  t.analyze();
  return t;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Walks an expression checking every reference against the task shape.
class Validator {
 public:
  Validator(const QuestionBank& bank, int k, int l, std::string where)
      : bank_(bank), k_(k), l_(l), where_(std::move(where)) {}

  void expr(const Expr& e, int depth) {
    std::visit(
        overloaded{
            [](const node::Literal&) {},
            [&](const node::Compare& c) {
              term(c.lhs, depth);
              term(c.rhs, depth);
            },
            [&](const node::And& a) {
              for (const auto& x : a.args) expr(x, depth);
            },
            [&](const node::Or& o) {
              for (const auto& x : o.args) expr(x, depth);
            },
            [&](const std::shared_ptr<const node::Not>& n) { expr(n->arg, depth); },
            [&](const std::shared_ptr<const node::ForAllInstances>& f) { expr(f->body, depth + 1); },
            [&](const std::shared_ptr<const node::PairwiseInstances>& p) {
              expr(p->body, depth + 2);
            },
            [&](const node::ForAllSlots& f) {
              scope(f.scope, depth);
              predicate(f.pred);
            },
            [&](const node::AllDifferentSlots& a) { instance(a.instance, depth); },
        },
        e.node());
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ModelError(where_ + ": " + what);
  }

  void term(const Term& t, int depth) {
    std::visit(overloaded{
                   [](const term::Const&) {},
                   [&](const term::Count& c) {
                     scope(c.scope, depth);
                     predicate(c.pred);
                   },
                   [&](const term::Sum& s) { scope(s.scope, depth); },
                   [&](const term::Share& s) {
                     scope(s.scope, depth);
                     predicate(s.pred);
                   },
                   [&](const term::Overlap& o) {
                     instance(o.a, depth);
                     instance(o.b, depth);
                   },
                   [&](const term::SlotAttr& s) {
                     instance(s.instance, depth);
                     slot(s.slot);
                   },
               },
               t);
  }

  void scope(const Scope& s, int depth) {
    if (s.kind == Scope::Kind::all) return;
    if (s.instances.empty()) fail("scope lists no instances");
    for (const auto& i : s.instances) instance(i, depth);
    if (s.kind == Scope::Kind::slot) {
      if (s.instances.size() != 1) fail("slot scope must name exactly one instance");
      slot(s.slot);
    }
  }

  void instance(const InstanceRef& ref, int depth) {
    if (ref.bound) {
      if (ref.value < 0 || ref.value >= depth)
        fail("instance variable $" + std::to_string(ref.value) + " is not bound here");
    } else if (ref.value < 1 || ref.value > k_) {
      fail("instance " + std::to_string(ref.value) + " outside 1.." + std::to_string(k_));
    }
  }

  void slot(int j) {
    if (j < 1 || j > l_) fail("slot " + std::to_string(j) + " outside 1.." + std::to_string(l_));
  }

  void value_in_range(Attribute a, int v) {
    int hi = 0;
    switch (a) {
      case Attribute::id:
        if (!bank_.value_of(v))
          fail("predicate references unknown question id " + std::to_string(v));
        return;
      case Attribute::qtype: hi = bank_.q_bar(); break;
      case Attribute::level: hi = bank_.r(); break;
      case Attribute::duration: return;
    }
    if (v < 1 || v > hi)
      fail("predicate references " + std::string(to_string(a)) + " " + std::to_string(v) +
           " outside 1.." + std::to_string(hi));
  }

  void predicate(const Predicate& p) {
    if (p.members) {
      for (int v : *p.members) value_in_range(p.attr, v);
    } else {
      value_in_range(p.attr, p.literal);
    }
  }

  const QuestionBank& bank_;
  int k_;
  int l_;
  std::string where_;
};

// Marks instances whose uniqueness is forced, i.e. AllDifferentSlots reached
// only through conjunctive nodes. Bound refs under a binder cover every
// instance the binder ranges over.
void collect_unique(const Expr& e, int k, std::vector<bool>& unique, int depth) {
  std::visit(overloaded{
                 [&](const node::And& a) {
                   for (const auto& x : a.args) collect_unique(x, k, unique, depth);
                 },
                 [&](const std::shared_ptr<const node::ForAllInstances>& f) {
                   collect_unique(f->body, k, unique, depth + 1);
                 },
                 [&](const std::shared_ptr<const node::PairwiseInstances>& p) {
                   if (k >= 2) collect_unique(p->body, k, unique, depth + 2);
                 },
                 [&](const node::AllDifferentSlots& a) {
                   if (a.instance.bound) {
                     std::fill(unique.begin(), unique.end(), true);
                   } else {
                     unique[static_cast<std::size_t>(a.instance.value - 1)] = true;
                   }
                 },
                 [](const auto&) {},
             },
             e.node());
}

bool scope_is_slot(const Scope& s) { return s.kind == Scope::Kind::slot; }

bool mentions_slot(const Term& t) {
  return std::visit(overloaded{
                        [](const term::Count& c) { return scope_is_slot(c.scope); },
                        [](const term::Sum& s) { return scope_is_slot(s.scope); },
                        [](const term::Share& s) { return scope_is_slot(s.scope); },
                        [](const term::SlotAttr&) { return true; },
                        [](const auto&) { return false; },
                    },
                    t);
}

bool mentions_slot(const Expr& e) {
  return std::visit(
      overloaded{
          [](const node::Literal&) { return false; },
          [](const node::Compare& c) { return mentions_slot(c.lhs) || mentions_slot(c.rhs); },
          [](const node::And& a) {
            return std::any_of(a.args.begin(), a.args.end(),
                               [](const Expr& x) { return mentions_slot(x); });
          },
          [](const node::Or& o) {
            return std::any_of(o.args.begin(), o.args.end(),
                               [](const Expr& x) { return mentions_slot(x); });
          },
          [](const std::shared_ptr<const node::Not>& n) { return mentions_slot(n->arg); },
          [](const std::shared_ptr<const node::ForAllInstances>& f) {
            return mentions_slot(f->body);
          },
          [](const std::shared_ptr<const node::PairwiseInstances>& p) {
            return mentions_slot(p->body);
          },
          [](const node::ForAllSlots& f) { return scope_is_slot(f.scope); },
          [](const node::AllDifferentSlots&) { return false; },
      },
      e.node());
}

}  // namespace

void MultiConfigTask::analyze() {
  unique_.assign(static_cast<std::size_t>(k_), false);
  slot_indexed_ = false;
  for (const auto& c : all_constraints()) {
    collect_unique(c.expr, k_, unique_, 0);
    slot_indexed_ = slot_indexed_ || mentions_slot(c.expr);
  }
}

MultiConfigTask build_task(std::shared_ptr<const QuestionBank> bank, int k, int l,
                           std::vector<Requirement> reqs, std::vector<NamedConstraint> cons) {
  if (!bank || bank->p() == 0) throw ModelError("question bank is empty");
  if (k < 1) throw ModelError("instance count k must be >= 1");
  if (l < 1) throw ModelError("slots per instance l must be >= 1");

  std::unordered_set<std::string> ids;
  auto check_id = [&](const std::string& id) {
    if (id.empty()) throw ModelError("constraint with empty id");
    if (!ids.insert(id).second) throw ModelError("duplicate constraint id '" + id + "'");
  };
  for (const auto& r : reqs) {
    check_id(r.id);
    if (r.owner.kind == Owner::Kind::examinee && (r.owner.instance < 1 || r.owner.instance > k))
      throw ModelError(r.id + ": owner examinee " + std::to_string(r.owner.instance) +
                       " outside 1.." + std::to_string(k));
    Validator(*bank, k, l, r.id).expr(r.expr, 0);
  }
  for (const auto& c : cons) {
    check_id(c.id);
    Validator(*bank, k, l, c.id).expr(c.expr, 0);
  }

  MultiConfigTask t;
  t.bank_ = std::move(bank);
  t.k_ = k;
  t.l_ = l;
  t.requirements_ = std::move(reqs);
  t.constraints_ = std::move(cons);
  t.analyze();
  if (t.any_unique() && l > t.bank_->p())
    throw ModelError("l exceeds p under uniqueness (l=" + std::to_string(l) +
                     ", p=" + std::to_string(t.bank_->p()) + ")");
  return t;
}

MultiConfigTask build_task(QuestionBank bank, int k, int l, std::vector<Requirement> reqs,
                           std::vector<NamedConstraint> cons) {
  return build_task(std::make_shared<const QuestionBank>(std::move(bank)), k, l, std::move(reqs),
                    std::move(cons));
}

// ---------------------------------------------------------------------------
// Evaluation

int resolve_instance(const InstanceRef& ref, const Bindings& env) {
  return ref.bound ? env.at(static_cast<std::size_t>(ref.value)) : ref.value;
}

std::vector<int> resolve_scope(const Scope& scope, const Bindings& env, int k, int l) {
  std::vector<int> slots;
  switch (scope.kind) {
    case Scope::Kind::all:
      slots.resize(static_cast<std::size_t>(k * l));
      for (int s = 0; s < k * l; ++s) slots[static_cast<std::size_t>(s)] = s;
      break;
    case Scope::Kind::instances: {
      std::vector<int> insts;
      for (const auto& ref : scope.instances) insts.push_back(resolve_instance(ref, env));
      std::sort(insts.begin(), insts.end());
      insts.erase(std::unique(insts.begin(), insts.end()), insts.end());
      for (int i : insts)
        for (int j = 0; j < l; ++j) slots.push_back((i - 1) * l + j);
      break;
    }
    case Scope::Kind::slot:
      slots.push_back((resolve_instance(scope.instances.front(), env) - 1) * l + scope.slot - 1);
      break;
  }
  return slots;
}

namespace {

class Evaluator {
 public:
  Evaluator(const MultiConfiguration& conf, const QuestionBank& bank) : conf_(conf), bank_(bank) {}

  const Question& at(int flat) const {
    return bank_.question(conf_.ids()[static_cast<std::size_t>(flat)]);
  }

  std::int64_t count(const Scope& s, const Predicate& p, const Bindings& env) const {
    std::int64_t n = 0;
    for (int slot : resolve_scope(s, env, conf_.k(), conf_.l()))
      if (p.holds(at(slot))) ++n;
    return n;
  }

  Rational term(const Term& t, const Bindings& env) const {
    return std::visit(
        overloaded{
            [](const term::Const& c) { return c.value; },
            [&](const term::Count& c) { return Rational(count(c.scope, c.pred, env)); },
            [&](const term::Sum& s) {
              std::int64_t total = 0;
              for (int slot : resolve_scope(s.scope, env, conf_.k(), conf_.l()))
                total += at(slot).attribute(s.attr);
              return Rational(total);
            },
            [&](const term::Share& s) {
              const auto size =
                  static_cast<std::int64_t>(resolve_scope(s.scope, env, conf_.k(), conf_.l()).size());
              return Rational(count(s.scope, s.pred, env), size);
            },
            [&](const term::Overlap& o) {
              auto a = conf_.exam(resolve_instance(o.a, env));
              auto b = conf_.exam(resolve_instance(o.b, env));
              std::set<int> in_a(a.begin(), a.end());
              std::set<int> shared;
              for (int id : b)
                if (in_a.contains(id)) shared.insert(id);
              return Rational(static_cast<std::int64_t>(shared.size()));
            },
            [&](const term::SlotAttr& s) {
              const int i = resolve_instance(s.instance, env);
              return Rational(bank_.question(conf_.at(i, s.slot)).attribute(s.attr));
            },
        },
        t);
  }

  bool expr(const Expr& e, Bindings& env) const {
    return std::visit(
        overloaded{
            [](const node::Literal& lit) { return lit.value; },
            [&](const node::Compare& c) { return compare(c.op, term(c.lhs, env), term(c.rhs, env)); },
            [&](const node::And& a) {
              for (const auto& x : a.args)
                if (!expr(x, env)) return false;
              return true;
            },
            [&](const node::Or& o) {
              for (const auto& x : o.args)
                if (expr(x, env)) return true;
              return false;
            },
            [&](const std::shared_ptr<const node::Not>& n) { return !expr(n->arg, env); },
            [&](const std::shared_ptr<const node::ForAllInstances>& f) {
              for (int i = 1; i <= conf_.k(); ++i) {
                env.push_back(i);
                const bool ok = expr(f->body, env);
                env.pop_back();
                if (!ok) return false;
              }
              return true;
            },
            [&](const std::shared_ptr<const node::PairwiseInstances>& p) {
              for (int i = 1; i <= conf_.k(); ++i) {
                for (int i2 = i + 1; i2 <= conf_.k(); ++i2) {
                  env.push_back(i);
                  env.push_back(i2);
                  const bool ok = expr(p->body, env);
                  env.pop_back();
                  env.pop_back();
                  if (!ok) return false;
                }
              }
              return true;
            },
            [&](const node::ForAllSlots& f) {
              for (int slot : resolve_scope(f.scope, env, conf_.k(), conf_.l()))
                if (!f.pred.holds(at(slot))) return false;
              return true;
            },
            [&](const node::AllDifferentSlots& a) {
              auto exam = conf_.exam(resolve_instance(a.instance, env));
              std::set<int> seen;
              for (int id : exam)
                if (!seen.insert(id).second) return false;
              return true;
            },
        },
        e.node());
  }

 private:
  const MultiConfiguration& conf_;
  const QuestionBank& bank_;
};

}  // namespace

Rational evaluate_term(const Term& t, const MultiConfiguration& conf, const QuestionBank& bank,
                       const Bindings& env) {
  return Evaluator(conf, bank).term(t, env);
}

bool evaluate(const Expr& expr, const MultiConfiguration& conf, const QuestionBank& bank,
              const Bindings& env) {
  Bindings local = env;
  return Evaluator(conf, bank).expr(expr, local);
}

std::optional<std::string> first_violation(const MultiConfiguration& conf,
                                           const MultiConfigTask& task) {
  for (const auto& r : task.requirements())
    if (!evaluate(r.expr, conf, task.bank())) return r.id;
  for (const auto& c : task.constraints())
    if (!evaluate(c.expr, conf, task.bank())) return c.id;
  return std::nullopt;
}

bool is_consistent(const MultiConfiguration& conf, const MultiConfigTask& task) {
  return !first_violation(conf, task).has_value();
}

}  // namespace multiconf
