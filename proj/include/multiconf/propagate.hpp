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

// Per-slot candidate domains and sound filtering to a fixpoint.
//
// Every constraint is compiled into unary filters (applied once when the
// store is created) and propagators. Propagators are monotone: on smaller
// domains they never prune less, so the fixpoint does not depend on the
// scheduling order. Anything the compiler does not recognize becomes a
// generic checker that evaluates the constraint once at most one of its slots
// is open.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiconf/bitset.hpp"
#include "multiconf/model.hpp"

namespace multiconf {

enum class Outcome { no_op, pruned, entailed, failed };

std::string_view to_string(Outcome o);

// Domains for the k*l slot variables; value v (1..p) is bit v-1.
class DomainStore {
 public:
  DomainStore() = default;
  DomainStore(int k, int l, int p);

  int k() const { return k_; }
  int l() const { return l_; }
  int p() const { return p_; }
  int slot_count() const { return k_ * l_; }
  int index(int instance, int slot) const { return (instance - 1) * l_ + (slot - 1); }

  const Bitset& domain(int flat) const { return domains_[static_cast<std::size_t>(flat)]; }
  const Bitset& domain(int instance, int slot) const { return domain(index(instance, slot)); }
  std::size_t size(int flat) const { return domain(flat).count(); }
  bool fixed(int flat) const;
  // Value of a fixed slot (1-based).
  int value(int flat) const { return static_cast<int>(domain(flat).first()) + 1; }
  bool failed() const { return failed_; }

  // Mutators return true if the domain changed. Emptying a domain marks the
  // store failed.
  bool restrict_to(int flat, const Bitset& keep);
  bool remove_all(int flat, const Bitset& drop);
  bool remove(int flat, int value);
  bool assign(int flat, int value);
  void mark_failed() { failed_ = true; }

  // Slots changed since the last take_touched().
  std::vector<int> take_touched();
  bool has_touched() const { return !touched_.empty(); }
  std::uint64_t change_count() const { return changes_; }

  // Total assignment; requires every slot fixed.
  MultiConfiguration assignment() const;

  friend bool operator==(const DomainStore& a, const DomainStore& b) {
    return a.k_ == b.k_ && a.l_ == b.l_ && a.failed_ == b.failed_ && a.domains_ == b.domains_;
  }

 private:
  void touch(int flat);

  int k_ = 0;
  int l_ = 0;
  int p_ = 0;
  bool failed_ = false;
  std::uint64_t changes_ = 0;
  std::vector<Bitset> domains_;
  std::vector<int> touched_;
  std::vector<char> in_touched_;
};

// Removes values failing a per-question test from a set of slots.
struct UnaryFilter {
  std::string constraint_id;
  std::vector<int> slots;
  Bitset keep;
};

class Propagator {
 public:
  Propagator(std::string constraint_id, std::vector<int> scope)
      : constraint_id_(std::move(constraint_id)), scope_(std::move(scope)) {}
  virtual ~Propagator() = default;

  // Stateless with respect to the store, so one instance can serve several
  // stores concurrently.
  virtual Outcome propagate(DomainStore& store) const = 0;
  virtual std::string_view kind() const = 0;

  const std::string& constraint_id() const { return constraint_id_; }
  const std::vector<int>& scope() const { return scope_; }

 private:
  std::string constraint_id_;
  std::vector<int> scope_;
};

// Individual filtering procedures. `slots` are flat indices; `mask` holds
// the values satisfying the predicate.

// lo <= #{slots taking a mask value} <= hi. With `distinct` the slots are
// known to be pairwise different, which caps the count by the number of
// mask values still available.
Outcome propagate_count(DomainStore& store, std::span<const int> slots, const Bitset& mask,
                        std::int64_t lo, std::int64_t hi, bool distinct = false);
// lo <= sum of weight[value-1] over slots <= hi. Prunes every value without
// support in the sum alone (reachable-sum tables); falls back to bounds
// reasoning when the sum range is very wide.
Outcome propagate_sum(DomainStore& store, std::span<const int> slots,
                      std::span<const std::int64_t> weight, std::int64_t lo, std::int64_t hi);
// Some slot of `slots` takes a value in `ids`.
Outcome propagate_choice(DomainStore& store, std::span<const int> slots, const Bitset& ids);
// Pairwise distinct values: singleton elimination, plus failure when no
// matching covers all slots.
Outcome propagate_alldiff(DomainStore& store, std::span<const int> slots);
// lo <= #distinct values fixed in both slot groups <= hi. With `distinct`
// each group is pairwise different, so open slots that cannot avoid the
// other side's values count toward the overlap early.
Outcome propagate_overlap(DomainStore& store, std::span<const int> a, std::span<const int> b,
                          std::int64_t lo, std::int64_t hi, bool distinct = false);
// Strictly ascending values along `slots`.
Outcome propagate_ascending(DomainStore& store, std::span<const int> slots);

// Values of `bank` whose question satisfies `pred`.
Bitset predicate_mask(const QuestionBank& bank, const Predicate& pred);

enum class Schedule { fifo, lifo };

struct CompileOptions {
  // Adds ascending-order propagators for instances with forced uniqueness
  // when no constraint names a slot position.
  bool symmetry_breaking = false;
};

struct UnaryFilter;
class PropagatorSet;
std::optional<UnaryFilter> compile_unary(const Expr& expr, const MultiConfigTask& task);

class PropagatorSet {
 public:
  static PropagatorSet compile(const MultiConfigTask& task, CompileOptions opts = {});

  // Full domains with every unary filter applied.
  DomainStore init_store() const;

  // Runs propagators until no domain changes. With from_scratch every
  // propagator is queued; otherwise only those watching touched slots.
  // Returns false if the store failed.
  bool fixpoint(DomainStore& store, bool from_scratch = true,
                Schedule schedule = Schedule::fifo) const;

  std::span<const std::unique_ptr<Propagator>> propagators() const { return props_; }
  std::span<const UnaryFilter> unary_filters() const { return unary_; }
  bool symmetry_active() const { return symmetry_active_; }
  const MultiConfigTask& task() const { return *task_; }

 private:
  std::shared_ptr<const MultiConfigTask> task_;
  std::vector<std::unique_ptr<Propagator>> props_;
  std::vector<UnaryFilter> unary_;
  std::vector<std::vector<int>> watchers_;  // slot -> propagator indices
  bool symmetry_active_ = false;

  friend class Compiler;
  friend std::optional<UnaryFilter> compile_unary(const Expr&, const MultiConfigTask&);
};

// Store for `task` with unary constraints applied once.
DomainStore init_store(const MultiConfigTask& task);

// Per-slot filter for expressions of a unary shape: a forall-slots attribute
// test, a count (or share) bounded above by zero, or a single-slot attribute
// comparison, possibly under forall-instances. nullopt means "not unary".
std::optional<UnaryFilter> compile_unary(const Expr& expr, const MultiConfigTask& task);

// Runs `props` on `store` to a fixpoint; the plain-list form of
// PropagatorSet::fixpoint.
bool fixpoint(DomainStore& store, std::span<const std::unique_ptr<Propagator>> props,
              Schedule schedule = Schedule::fifo);

}  // namespace multiconf
