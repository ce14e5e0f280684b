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

// Multi-configuration task representation: a question bank (the value
// universe), k instances of l slots each, requirements REQ and constraints C
// stated as ConstraintExpr trees, and the reference evaluator deciding
// satisfaction on complete assignments.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "multiconf/rational.hpp"

namespace multiconf {

enum class Attribute { id, qtype, level, duration };
enum class CmpOp { le, lt, eq, ne, gt, ge };

std::string_view to_string(Attribute a);
std::string_view to_string(CmpOp op);
std::optional<Attribute> parse_attribute(std::string_view s);
std::optional<CmpOp> parse_cmp_op(std::string_view s);

bool compare(CmpOp op, const Rational& lhs, const Rational& rhs);

// Closed integer interval [lo, hi]; empty when lo > hi.
struct CountBand {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool empty() const { return lo > hi; }
  bool contains(std::int64_t c) const { return lo <= c && c <= hi; }
  friend bool operator==(const CountBand&, const CountBand&) = default;
};

// Integers c in [0, n] with `c op bound`. `!=` is not an interval and yields
// std::nullopt.
std::optional<CountBand> count_band(CmpOp op, const Rational& bound, std::int64_t n);
// Integers c in [0, n] with `c/n op bound`, by cross-multiplying the bound
// with n; no division is ever rounded.
std::optional<CountBand> share_band(CmpOp op, const Rational& bound, std::int64_t n);

struct Question {
  int id = 0;
  int qtype = 0;
  int level = 0;
  int duration = 0;

  int attribute(Attribute a) const {
    switch (a) {
      case Attribute::id: return id;
      case Attribute::qtype: return qtype;
      case Attribute::level: return level;
      case Attribute::duration: return duration;
    }
    return 0;
  }
  friend bool operator==(const Question&, const Question&) = default;
};

// The value universe. Questions keep the id they were authored with; the
// solver works on values 1..p, assigned in input order. value_of() is the
// remap table from authored id to value (identity when ids are 1..p in order).
class QuestionBank {
 public:
  // q_bar and r default to the largest observed category and level.
  explicit QuestionBank(std::vector<Question> questions, int q_bar = 0, int r = 0);

  int p() const { return static_cast<int>(questions_.size()); }
  int q_bar() const { return q_bar_; }
  int r() const { return r_; }

  // Question for value 1..p.
  const Question& question(int value) const {
    return questions_[static_cast<std::size_t>(value - 1)];
  }
  std::span<const Question> questions() const { return questions_; }
  std::optional<int> value_of(int id) const;
  // True unless every question's id equals its value.
  bool remapped() const;

 private:
  std::vector<Question> questions_;
  std::vector<std::pair<int, int>> by_id_;  // (id, value), sorted by id
  int q_bar_ = 0;
  int r_ = 0;
};

// Reference to an examinee: either a literal 1-based index or a variable
// bound by an enclosing ForAllInstances / PairwiseInstances. Bound refs are
// numbered by binder depth, outermost first; PairwiseInstances binds two.
struct InstanceRef {
  bool bound = false;
  int value = 1;

  static InstanceRef literal(int instance) { return {false, instance}; }
  static InstanceRef var(int depth) { return {true, depth}; }
  friend bool operator==(const InstanceRef&, const InstanceRef&) = default;
};

struct Scope {
  enum class Kind { instances, all, slot };
  Kind kind = Kind::all;
  std::vector<InstanceRef> instances;  // instances: the listed examinees; slot: the owner
  int slot = 0;                        // slot kind only, 1-based

  static Scope of(InstanceRef i) { return {Kind::instances, {i}, 0}; }
  static Scope of(std::vector<InstanceRef> is) { return {Kind::instances, std::move(is), 0}; }
  static Scope everything() { return {Kind::all, {}, 0}; }
  static Scope single_slot(InstanceRef i, int slot) { return {Kind::slot, {i}, slot}; }
};

// Per-question test: attribute membership in a literal set, or attribute
// comparison against a literal.
struct Predicate {
  Attribute attr = Attribute::id;
  std::optional<std::vector<int>> members;
  CmpOp op = CmpOp::eq;
  int literal = 0;

  static Predicate in(Attribute a, std::vector<int> values) {
    return {a, std::move(values), CmpOp::eq, 0};
  }
  static Predicate cmp(Attribute a, CmpOp op, int literal) {
    return {a, std::nullopt, op, literal};
  }

  bool holds(const Question& q) const;
};

namespace term {
struct Const { Rational value; };
struct Count { Scope scope; Predicate pred; };
struct Sum { Scope scope; Attribute attr; };
struct Share { Scope scope; Predicate pred; };
struct Overlap { InstanceRef a; InstanceRef b; };
struct SlotAttr { InstanceRef instance; int slot; Attribute attr; };
}  // namespace term

using Term = std::variant<term::Const, term::Count, term::Sum, term::Share, term::Overlap,
                          term::SlotAttr>;

class Expr;

namespace node {
struct Literal { bool value; };
struct Compare { CmpOp op; Term lhs; Term rhs; };
struct And { std::vector<Expr> args; };
struct Or { std::vector<Expr> args; };
struct Not;
struct ForAllInstances;
struct PairwiseInstances;
struct ForAllSlots { Scope scope; Predicate pred; };
struct AllDifferentSlots { InstanceRef instance; };
}  // namespace node

// Immutable boolean constraint expression. Copies share the tree.
class Expr {
 public:
  using Node = std::variant<node::Literal, node::Compare, node::And, node::Or,
                            std::shared_ptr<const node::Not>,
                            std::shared_ptr<const node::ForAllInstances>,
                            std::shared_ptr<const node::PairwiseInstances>, node::ForAllSlots,
                            node::AllDifferentSlots>;

  Expr() : node_(std::make_shared<const Node>(node::Literal{true})) {}
  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

namespace node {
struct Not { Expr arg; };
struct ForAllInstances { Expr body; };
struct PairwiseInstances { Expr body; };
}  // namespace node

// Builders for readable construction of expression trees.
namespace cx {
inline Term constant(Rational v) { return term::Const{v}; }
inline Term count(Scope s, Predicate p) { return term::Count{std::move(s), std::move(p)}; }
inline Term sum(Scope s, Attribute a) { return term::Sum{std::move(s), a}; }
inline Term share(Scope s, Predicate p) { return term::Share{std::move(s), std::move(p)}; }
inline Term overlap(InstanceRef a, InstanceRef b) { return term::Overlap{a, b}; }
inline Term slot_attr(InstanceRef i, int slot, Attribute a) { return term::SlotAttr{i, slot, a}; }

inline Expr truth(bool v) { return Expr(node::Literal{v}); }
inline Expr compare(CmpOp op, Term lhs, Term rhs) {
  return Expr(node::Compare{op, std::move(lhs), std::move(rhs)});
}
inline Expr all_of(std::vector<Expr> args) { return Expr(node::And{std::move(args)}); }
inline Expr any_of(std::vector<Expr> args) { return Expr(node::Or{std::move(args)}); }
inline Expr negate(Expr e) { return Expr(std::make_shared<const node::Not>(node::Not{std::move(e)})); }
inline Expr for_all_instances(Expr body) {
  return Expr(std::make_shared<const node::ForAllInstances>(node::ForAllInstances{std::move(body)}));
}
inline Expr pairwise_instances(Expr body) {
  return Expr(
      std::make_shared<const node::PairwiseInstances>(node::PairwiseInstances{std::move(body)}));
}
inline Expr for_all_slots(Scope s, Predicate p) {
  return Expr(node::ForAllSlots{std::move(s), std::move(p)});
}
inline Expr all_different(InstanceRef i) { return Expr(node::AllDifferentSlots{i}); }
}  // namespace cx

struct Owner {
  enum class Kind { examinee, instructor };
  Kind kind = Kind::instructor;
  int instance = 0;  // examinee only

  static Owner examinee(int i) { return {Kind::examinee, i}; }
  static Owner instructor() { return {Kind::instructor, 0}; }
  std::string to_string() const;
  friend bool operator==(const Owner&, const Owner&) = default;
};

struct Requirement {
  std::string id;
  Owner owner;
  Expr expr;
  std::string label;
};

struct NamedConstraint {
  std::string id;
  Expr expr;
  std::string label;
};

// Total assignment (instance, slot) -> question value (1..p, see
// QuestionBank); row-major, 1-based API.
class MultiConfiguration {
 public:
  MultiConfiguration() = default;
  MultiConfiguration(int k, int l, std::vector<int> ids);
  MultiConfiguration(int k, int l) : MultiConfiguration(k, l, std::vector<int>(static_cast<std::size_t>(k * l), 1)) {}

  int k() const { return k_; }
  int l() const { return l_; }
  int at(int instance, int slot) const { return ids_[index(instance, slot)]; }
  void set(int instance, int slot, int id) { ids_[index(instance, slot)] = id; }
  std::span<const int> exam(int instance) const {
    return std::span<const int>(ids_).subspan(index(instance, 1), static_cast<std::size_t>(l_));
  }
  const std::vector<int>& ids() const { return ids_; }

  friend bool operator==(const MultiConfiguration&, const MultiConfiguration&) = default;
  friend auto operator<=>(const MultiConfiguration& a, const MultiConfiguration& b) {
    return a.ids_ <=> b.ids_;
  }

 private:
  std::size_t index(int instance, int slot) const {
    return static_cast<std::size_t>((instance - 1) * l_ + (slot - 1));
  }
  int k_ = 0;
  int l_ = 0;
  std::vector<int> ids_;
};

// Definition of the task (V, D, REQ, C). Construct through build_task.
class MultiConfigTask {
 public:
  const QuestionBank& bank() const { return *bank_; }
  const std::shared_ptr<const QuestionBank>& shared_bank() const { return bank_; }
  int k() const { return k_; }
  int l() const { return l_; }
  int slot_count() const { return k_ * l_; }
  const std::vector<Requirement>& requirements() const { return requirements_; }
  const std::vector<NamedConstraint>& constraints() const { return constraints_; }

  // Every REQ and C member, requirements first, in declaration order.
  std::vector<NamedConstraint> all_constraints() const;
  std::vector<std::string> all_ids() const;
  const Expr* find(std::string_view id) const;
  bool is_requirement(std::string_view id) const;

  // Same V and D, keeping only the listed REQ/C members. Throws ModelError on
  // unknown ids.
  MultiConfigTask restricted_to(std::span<const std::string> ids) const;

  // Per-instance uniqueness forced by AllDifferentSlots in a conjunctive
  // position. Index 1..k.
  bool unique_instance(int instance) const {
    return unique_[static_cast<std::size_t>(instance - 1)];
  }
  bool any_unique() const;
  // True if some constraint names a specific slot position.
  bool references_slot_index() const { return slot_indexed_; }

 private:
  friend MultiConfigTask build_task(std::shared_ptr<const QuestionBank>, int, int,
                                    std::vector<Requirement>, std::vector<NamedConstraint>);
  void analyze();

  std::shared_ptr<const QuestionBank> bank_;
  int k_ = 0;
  int l_ = 0;
  std::vector<Requirement> requirements_;
  std::vector<NamedConstraint> constraints_;
  std::vector<bool> unique_;
  bool slot_indexed_ = false;
};

// Validates and assembles a task. Throws ModelError on an empty bank, k or l
// below 1, duplicate ids, references outside 1..k / 1..l, predicate literals
// outside the bank's id/category/level ranges, or l > p under uniqueness.
MultiConfigTask build_task(std::shared_ptr<const QuestionBank> bank, int k, int l,
                           std::vector<Requirement> reqs, std::vector<NamedConstraint> cons);
MultiConfigTask build_task(QuestionBank bank, int k, int l, std::vector<Requirement> reqs,
                           std::vector<NamedConstraint> cons);

// Values of bound instance variables, outermost binder first.
using Bindings = std::vector<int>;

int resolve_instance(const InstanceRef& ref, const Bindings& env);
// Flat 0-based slot indices (row-major) covered by `scope`.
std::vector<int> resolve_scope(const Scope& scope, const Bindings& env, int k, int l);

Rational evaluate_term(const Term& t, const MultiConfiguration& conf, const QuestionBank& bank,
                       const Bindings& env = {});
bool evaluate(const Expr& expr, const MultiConfiguration& conf, const QuestionBank& bank,
              const Bindings& env = {});

// CONF ∪ C ∪ REQ consistent: every member evaluates true.
bool is_consistent(const MultiConfiguration& conf, const MultiConfigTask& task);
// Id of the first violated member, if any.
std::optional<std::string> first_violation(const MultiConfiguration& conf,
                                           const MultiConfigTask& task);

}  // namespace multiconf
