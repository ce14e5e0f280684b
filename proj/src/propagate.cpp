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

#include "multiconf/propagate.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <utility>

#include "multiconf/error.hpp"

namespace multiconf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Beyond this sum range the reachable-sum tables get too large and the sum
// propagator only reasons on bounds.
constexpr std::int64_t kMaxSumTableRange = 4096;

Outcome changed_since(const DomainStore& store, std::uint64_t before) {
  if (store.failed()) return Outcome::failed;
  return store.change_count() != before ? Outcome::pruned : Outcome::no_op;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::no_op: return "no-op";
    case Outcome::pruned: return "pruned";
    case Outcome::entailed: return "entailed";
    case Outcome::failed: return "failed";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// DomainStore

DomainStore::DomainStore(int k, int l, int p)
    : k_(k),
      l_(l),
      p_(p),
      domains_(static_cast<std::size_t>(k * l), Bitset(static_cast<std::size_t>(p), true)),
      in_touched_(static_cast<std::size_t>(k * l), 0) {}

bool DomainStore::fixed(int flat) const {
  const auto& d = domain(flat);
  const std::size_t first = d.first();
  return first < d.size() && d.next(first + 1) == d.size();
}

void DomainStore::touch(int flat) {
  ++changes_;
  auto& flag = in_touched_[static_cast<std::size_t>(flat)];
  if (!flag) {
    flag = 1;
    touched_.push_back(flat);
  }
  if (domains_[static_cast<std::size_t>(flat)].none()) failed_ = true;
}

bool DomainStore::restrict_to(int flat, const Bitset& keep) {
  auto& d = domains_[static_cast<std::size_t>(flat)];
  if (d.is_subset_of(keep)) return false;
  d &= keep;
  touch(flat);
  return true;
}

bool DomainStore::remove_all(int flat, const Bitset& drop) {
  auto& d = domains_[static_cast<std::size_t>(flat)];
  if (!d.intersects(drop)) return false;
  d.subtract(drop);
  touch(flat);
  return true;
}

bool DomainStore::remove(int flat, int value) {
  auto& d = domains_[static_cast<std::size_t>(flat)];
  const auto bit = static_cast<std::size_t>(value - 1);
  if (!d.test(bit)) return false;
  d.reset(bit);
  touch(flat);
  return true;
}

bool DomainStore::assign(int flat, int value) {
  Bitset keep(static_cast<std::size_t>(p_));
  keep.set(static_cast<std::size_t>(value - 1));
  return restrict_to(flat, keep);
}

std::vector<int> DomainStore::take_touched() {
  std::vector<int> out;
  out.swap(touched_);
  for (int s : out) in_touched_[static_cast<std::size_t>(s)] = 0;
  return out;
}

MultiConfiguration DomainStore::assignment() const {
  std::vector<int> ids(static_cast<std::size_t>(slot_count()));
  for (int s = 0; s < slot_count(); ++s) ids[static_cast<std::size_t>(s)] = value(s);
  return MultiConfiguration(k_, l_, std::move(ids));
}

Bitset predicate_mask(const QuestionBank& bank, const Predicate& pred) {
  Bitset mask(static_cast<std::size_t>(bank.p()));
  for (int v = 1; v <= bank.p(); ++v)
    if (pred.holds(bank.question(v))) mask.set(static_cast<std::size_t>(v - 1));
  return mask;
}

// ---------------------------------------------------------------------------
// Filtering procedures

Outcome propagate_count(DomainStore& store, std::span<const int> slots, const Bitset& mask,
                        std::int64_t lo, std::int64_t hi, bool distinct) {
  if (store.failed()) return Outcome::failed;
  std::int64_t possible = 0;
  std::int64_t forced = 0;
  for (int s : slots) {
    const auto& d = store.domain(s);
    if (d.intersects(mask)) {
      ++possible;
      if (d.is_subset_of(mask)) ++forced;
    }
  }
  std::int64_t can_hit = possible;
  std::int64_t must_hit = forced;
  if (distinct) {
    // Pairwise distinct slots: at most one slot per available value.
    Bitset all(mask.size());
    for (int s : slots) all |= store.domain(s);
    Bitset outside = all;
    outside.subtract(mask);
    all &= mask;
    const auto n = static_cast<std::int64_t>(slots.size());
    can_hit = std::min(can_hit, static_cast<std::int64_t>(all.count()));
    must_hit = std::max(must_hit, n - static_cast<std::int64_t>(outside.count()));
  }
  if (can_hit < lo || must_hit > hi) {
    store.mark_failed();
    return Outcome::failed;
  }
  if (forced >= lo && possible <= hi) return Outcome::entailed;

  const auto before = store.change_count();
  if (possible == lo) {
    // Every slot that can contribute must.
    for (int s : slots)
      if (store.domain(s).intersects(mask)) store.restrict_to(s, mask);
  } else if (forced == hi) {
    // No further slot may contribute.
    for (int s : slots)
      if (!store.domain(s).is_subset_of(mask)) store.remove_all(s, mask);
  }
  return changed_since(store, before);
}

namespace {

// {a + b : a in lhs, b in rhs}, truncated to `size` bits.
Bitset sumset(const Bitset& lhs, const Bitset& rhs, std::size_t size) {
  Bitset out(size);
  rhs.for_each([&](std::size_t b) { out.or_shifted(lhs, b); });
  return out;
}

}  // namespace

Outcome propagate_sum(DomainStore& store, std::span<const int> slots,
                      std::span<const std::int64_t> weight, std::int64_t lo, std::int64_t hi) {
  if (store.failed()) return Outcome::failed;
  const std::size_t n = slots.size();
  std::vector<std::int64_t> minw(n);
  std::vector<std::int64_t> maxw(n);
  std::int64_t smin = 0;
  std::int64_t smax = 0;
  for (std::size_t t = 0; t < n; ++t) {
    std::int64_t mn = std::numeric_limits<std::int64_t>::max();
    std::int64_t mx = std::numeric_limits<std::int64_t>::min();
    store.domain(slots[t]).for_each([&](std::size_t v) {
      mn = std::min(mn, weight[v]);
      mx = std::max(mx, weight[v]);
    });
    minw[t] = mn;
    maxw[t] = mx;
    smin += mn;
    smax += mx;
  }
  if (smin > hi || smax < lo) {
    store.mark_failed();
    return Outcome::failed;
  }
  if (lo <= smin && smax <= hi) return Outcome::entailed;

  const auto before = store.change_count();
  const std::int64_t range = smax - smin;
  if (range > kMaxSumTableRange) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::int64_t others_min = smin - minw[t];
      const std::int64_t others_max = smax - maxw[t];
      Bitset drop(static_cast<std::size_t>(store.p()));
      store.domain(slots[t]).for_each([&](std::size_t v) {
        if (weight[v] + others_min > hi || weight[v] + others_max < lo) drop.set(v);
      });
      store.remove_all(slots[t], drop);
      if (store.failed()) return Outcome::failed;
    }
    return changed_since(store, before);
  }

  // Reachable offset sums (relative to smin) over prefixes and suffixes.
  const auto width = static_cast<std::size_t>(range + 1);
  std::vector<Bitset> offsets(n);
  for (std::size_t t = 0; t < n; ++t) {
    offsets[t] = Bitset(static_cast<std::size_t>(maxw[t] - minw[t] + 1));
    store.domain(slots[t]).for_each(
        [&](std::size_t v) { offsets[t].set(static_cast<std::size_t>(weight[v] - minw[t])); });
  }
  std::vector<Bitset> prefix(n + 1, Bitset(width));
  std::vector<Bitset> suffix(n + 1, Bitset(width));
  prefix[0].set(0);
  suffix[n].set(0);
  for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = sumset(prefix[t], offsets[t], width);
  for (std::size_t t = n; t-- > 0;) suffix[t] = sumset(suffix[t + 1], offsets[t], width);

  for (std::size_t t = 0; t < n; ++t) {
    const Bitset others = sumset(prefix[t], suffix[t + 1], width);
    Bitset drop(static_cast<std::size_t>(store.p()));
    store.domain(slots[t]).for_each([&](std::size_t v) {
      const std::int64_t d = weight[v] - minw[t];
      const std::int64_t need_lo = std::max<std::int64_t>(0, lo - smin - d);
      const std::int64_t need_hi = std::min<std::int64_t>(range, hi - smin - d);
      if (need_lo > need_hi ||
          !others.any_in(static_cast<std::size_t>(need_lo), static_cast<std::size_t>(need_hi)))
        drop.set(v);
    });
    store.remove_all(slots[t], drop);
    if (store.failed()) return Outcome::failed;
  }
  return changed_since(store, before);
}

Outcome propagate_choice(DomainStore& store, std::span<const int> slots, const Bitset& ids) {
  return propagate_count(store, slots, ids, 1, static_cast<std::int64_t>(slots.size()));
}

namespace {

// Kuhn's augmenting paths; true if every slot gets a distinct value.
bool has_covering_matching(const DomainStore& store, std::span<const int> slots) {
  std::vector<int> owner(static_cast<std::size_t>(store.p()), -1);
  std::vector<char> visited;
  auto augment = [&](auto&& self, std::size_t t) -> bool {
    const auto& d = store.domain(slots[t]);
    for (std::size_t v = d.first(); v < d.size(); v = d.next(v + 1)) {
      if (visited[v]) continue;
      visited[v] = 1;
      if (owner[v] < 0 || self(self, static_cast<std::size_t>(owner[v]))) {
        owner[v] = static_cast<int>(t);
        return true;
      }
    }
    return false;
  };
  for (std::size_t t = 0; t < slots.size(); ++t) {
    visited.assign(static_cast<std::size_t>(store.p()), 0);
    if (!augment(augment, t)) return false;
  }
  return true;
}

}  // namespace

Outcome propagate_alldiff(DomainStore& store, std::span<const int> slots) {
  if (store.failed()) return Outcome::failed;
  const auto before = store.change_count();
  bool again = true;
  while (again) {
    again = false;
    for (int s : slots) {
      if (!store.fixed(s)) continue;
      const int v = store.value(s);
      for (int t : slots) {
        if (t == s || !store.domain(t).test(static_cast<std::size_t>(v - 1))) continue;
        if (store.fixed(t)) {
          store.mark_failed();
          return Outcome::failed;
        }
        store.remove(t, v);
        if (store.fixed(t)) again = true;
      }
    }
  }
  if (!has_covering_matching(store, slots)) {
    store.mark_failed();
    return Outcome::failed;
  }
  return changed_since(store, before);
}

namespace {

// Lower bound on how many distinct values the open slots of `x` must take
// from `other_fixed`, given that x's slots are pairwise different.
std::int64_t forced_into(const DomainStore& store, std::span<const int> x,
                         const Bitset& x_fixed, const Bitset& other_fixed) {
  Bitset open_union(other_fixed.size());
  std::int64_t open = 0;
  for (int s : x) {
    if (store.fixed(s)) continue;
    ++open;
    open_union |= store.domain(s);
  }
  open_union.subtract(x_fixed);
  Bitset elsewhere = open_union;
  elsewhere.subtract(other_fixed);
  return std::max<std::int64_t>(0, open - static_cast<std::int64_t>(elsewhere.count()));
}

}  // namespace

Outcome propagate_overlap(DomainStore& store, std::span<const int> a, std::span<const int> b,
                          std::int64_t lo, std::int64_t hi, bool distinct) {
  if (store.failed()) return Outcome::failed;
  const auto p = static_cast<std::size_t>(store.p());
  Bitset fixed_a(p), fixed_b(p), poss_a(p), poss_b(p);
  for (int s : a) {
    poss_a |= store.domain(s);
    if (store.fixed(s)) fixed_a.set(static_cast<std::size_t>(store.value(s) - 1));
  }
  for (int s : b) {
    poss_b |= store.domain(s);
    if (store.fixed(s)) fixed_b.set(static_cast<std::size_t>(store.value(s) - 1));
  }
  const auto shared = static_cast<std::int64_t>((fixed_a & fixed_b).count());
  if (distinct) {
    const Bitset only_a = [&] { Bitset t = fixed_a; t.subtract(fixed_b); return t; }();
    const Bitset only_b = [&] { Bitset t = fixed_b; t.subtract(fixed_a); return t; }();
    // Values fixed on one side that the other side cannot avoid; they are
    // distinct across the two directions, so the bounds add up.
    const std::int64_t forced =
        forced_into(store, b, fixed_b, only_a) + forced_into(store, a, fixed_a, only_b);
    if (shared + forced > hi) {
      store.mark_failed();
      return Outcome::failed;
    }
  }
  const auto capacity = static_cast<std::int64_t>(std::min(a.size(), b.size()));
  const auto reachable =
      std::min(static_cast<std::int64_t>((poss_a & poss_b).count()), capacity);
  if (shared > hi || reachable < lo) {
    store.mark_failed();
    return Outcome::failed;
  }
  if (shared >= lo && reachable <= hi) return Outcome::entailed;

  const auto before = store.change_count();
  if (shared == hi) {
    Bitset drop_b = fixed_a;
    drop_b.subtract(fixed_b);
    Bitset drop_a = fixed_b;
    drop_a.subtract(fixed_a);
    for (int s : b)
      if (!store.fixed(s)) store.remove_all(s, drop_b);
    for (int s : a)
      if (!store.fixed(s)) store.remove_all(s, drop_a);
  }
  return changed_since(store, before);
}

Outcome propagate_ascending(DomainStore& store, std::span<const int> slots) {
  if (store.failed()) return Outcome::failed;
  const auto before = store.change_count();
  const auto p = static_cast<std::size_t>(store.p());
  bool again = true;
  while (again && !store.failed()) {
    again = false;
    for (std::size_t t = 0; t + 1 < slots.size(); ++t) {
      const std::size_t lo = store.domain(slots[t]).first();
      if (lo >= p) break;
      Bitset drop(p);
      for (std::size_t v = 0; v <= lo; ++v) drop.set(v);
      if (store.remove_all(slots[t + 1], drop)) again = true;
      if (store.failed()) return Outcome::failed;
    }
    for (std::size_t t = slots.size(); t-- > 1;) {
      const std::size_t hi = store.domain(slots[t]).last();
      if (hi >= p) break;
      Bitset drop(p);
      for (std::size_t v = hi; v < p; ++v) drop.set(v);
      if (store.remove_all(slots[t - 1], drop)) again = true;
      if (store.failed()) return Outcome::failed;
    }
  }
  return changed_since(store, before);
}

// ---------------------------------------------------------------------------
// Propagator classes

namespace {

class CountPropagator final : public Propagator {
 public:
  CountPropagator(std::string id, std::vector<int> slots, Bitset mask, std::int64_t lo,
                  std::int64_t hi, bool distinct)
      : Propagator(std::move(id), std::move(slots)),
        mask_(std::move(mask)),
        lo_(lo),
        hi_(hi),
        distinct_(distinct) {}
  Outcome propagate(DomainStore& store) const override {
    return propagate_count(store, scope(), mask_, lo_, hi_, distinct_);
  }
  std::string_view kind() const override { return "count"; }

 private:
  Bitset mask_;
  std::int64_t lo_;
  std::int64_t hi_;
  bool distinct_;
};

class SumPropagator final : public Propagator {
 public:
  SumPropagator(std::string id, std::vector<int> slots, std::vector<std::int64_t> weight,
                std::int64_t lo, std::int64_t hi)
      : Propagator(std::move(id), std::move(slots)), weight_(std::move(weight)), lo_(lo), hi_(hi) {}
  Outcome propagate(DomainStore& store) const override {
    return propagate_sum(store, scope(), weight_, lo_, hi_);
  }
  std::string_view kind() const override { return "sum"; }

 private:
  std::vector<std::int64_t> weight_;
  std::int64_t lo_;
  std::int64_t hi_;
};

class AllDifferentPropagator final : public Propagator {
 public:
  using Propagator::Propagator;
  Outcome propagate(DomainStore& store) const override { return propagate_alldiff(store, scope()); }
  std::string_view kind() const override { return "alldiff"; }
};

class OverlapPropagator final : public Propagator {
 public:
  OverlapPropagator(std::string id, std::vector<int> a, std::vector<int> b, std::int64_t lo,
                    std::int64_t hi, bool distinct)
      : Propagator(std::move(id), concat(a, b)),
        a_(std::move(a)),
        b_(std::move(b)),
        lo_(lo),
        hi_(hi),
        distinct_(distinct) {}
  Outcome propagate(DomainStore& store) const override {
    return propagate_overlap(store, a_, b_, lo_, hi_, distinct_);
  }
  std::string_view kind() const override { return "overlap"; }

 private:
  static std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
  std::vector<int> a_;
  std::vector<int> b_;
  std::int64_t lo_;
  std::int64_t hi_;
  bool distinct_;
};

class AscendingPropagator final : public Propagator {
 public:
  using Propagator::Propagator;
  Outcome propagate(DomainStore& store) const override {
    return propagate_ascending(store, scope());
  }
  std::string_view kind() const override { return "symmetry"; }
};

class FailPropagator final : public Propagator {
 public:
  explicit FailPropagator(std::string id) : Propagator(std::move(id), {}) {}
  Outcome propagate(DomainStore& store) const override {
    store.mark_failed();
    return Outcome::failed;
  }
  std::string_view kind() const override { return "false"; }
};

// Evaluates the constraint once at most one slot in its scope is open,
// pruning the open slot to the values that make it true.
class CheckerPropagator final : public Propagator {
 public:
  CheckerPropagator(std::string id, std::vector<int> slots, Expr expr, Bindings env,
                    std::shared_ptr<const QuestionBank> bank)
      : Propagator(std::move(id), std::move(slots)),
        expr_(std::move(expr)),
        env_(std::move(env)),
        bank_(std::move(bank)) {}

  Outcome propagate(DomainStore& store) const override {
    int open = -1;
    for (int s : scope()) {
      if (store.fixed(s)) continue;
      if (open >= 0) return Outcome::no_op;
      open = s;
    }
    std::vector<int> ids(static_cast<std::size_t>(store.slot_count()));
    for (int s = 0; s < store.slot_count(); ++s)
      ids[static_cast<std::size_t>(s)] = static_cast<int>(store.domain(s).first()) + 1;
    MultiConfiguration conf(store.k(), store.l(), std::move(ids));
    if (open < 0) {
      if (evaluate(expr_, conf, *bank_, env_)) return Outcome::entailed;
      store.mark_failed();
      return Outcome::failed;
    }
    Bitset keep(static_cast<std::size_t>(store.p()));
    const int instance = open / store.l() + 1;
    const int slot = open % store.l() + 1;
    store.domain(open).for_each([&](std::size_t v) {
      conf.set(instance, slot, static_cast<int>(v) + 1);
      if (evaluate(expr_, conf, *bank_, env_)) keep.set(v);
    });
    const auto before = store.change_count();
    store.restrict_to(open, keep);
    return store.failed() ? Outcome::failed : changed_since(store, before);
  }
  std::string_view kind() const override { return "checker"; }

 private:
  Expr expr_;
  Bindings env_;
  std::shared_ptr<const QuestionBank> bank_;
};

CmpOp mirror(CmpOp op) {
  switch (op) {
    case CmpOp::le: return CmpOp::ge;
    case CmpOp::lt: return CmpOp::gt;
    case CmpOp::ge: return CmpOp::le;
    case CmpOp::gt: return CmpOp::lt;
    default: return op;
  }
}

CmpOp negation(CmpOp op) {
  switch (op) {
    case CmpOp::le: return CmpOp::gt;
    case CmpOp::lt: return CmpOp::ge;
    case CmpOp::eq: return CmpOp::ne;
    case CmpOp::ne: return CmpOp::eq;
    case CmpOp::gt: return CmpOp::le;
    case CmpOp::ge: return CmpOp::lt;
  }
  return op;
}

// Slots an expression can read under the given bindings, enumerating every
// value of nested binders.
void mark_term_slots(const Term& t, const Bindings& env, int k, int l, std::vector<char>& mark) {
  auto scope = [&](const Scope& s) {
    for (int slot : resolve_scope(s, env, k, l)) mark[static_cast<std::size_t>(slot)] = 1;
  };
  auto instance = [&](const InstanceRef& r) {
    const int i = resolve_instance(r, env);
    for (int j = 0; j < l; ++j) mark[static_cast<std::size_t>((i - 1) * l + j)] = 1;
  };
  std::visit(overloaded{
                 [](const term::Const&) {},
                 [&](const term::Count& c) { scope(c.scope); },
                 [&](const term::Sum& s) { scope(s.scope); },
                 [&](const term::Share& s) { scope(s.scope); },
                 [&](const term::Overlap& o) {
                   instance(o.a);
                   instance(o.b);
                 },
                 [&](const term::SlotAttr& s) {
                   const int i = resolve_instance(s.instance, env);
                   mark[static_cast<std::size_t>((i - 1) * l + s.slot - 1)] = 1;
                 },
             },
             t);
}

void mark_slots(const Expr& e, Bindings& env, int k, int l, std::vector<char>& mark) {
  std::visit(
      overloaded{
          [](const node::Literal&) {},
          [&](const node::Compare& c) {
            mark_term_slots(c.lhs, env, k, l, mark);
            mark_term_slots(c.rhs, env, k, l, mark);
          },
          [&](const node::And& a) {
            for (const auto& x : a.args) mark_slots(x, env, k, l, mark);
          },
          [&](const node::Or& o) {
            for (const auto& x : o.args) mark_slots(x, env, k, l, mark);
          },
          [&](const std::shared_ptr<const node::Not>& n) { mark_slots(n->arg, env, k, l, mark); },
          [&](const std::shared_ptr<const node::ForAllInstances>& f) {
            for (int i = 1; i <= k; ++i) {
              env.push_back(i);
              mark_slots(f->body, env, k, l, mark);
              env.pop_back();
            }
          },
          [&](const std::shared_ptr<const node::PairwiseInstances>& p) {
            for (int i = 1; i <= k; ++i)
              for (int i2 = i + 1; i2 <= k; ++i2) {
                env.push_back(i);
                env.push_back(i2);
                mark_slots(p->body, env, k, l, mark);
                env.pop_back();
                env.pop_back();
              }
          },
          [&](const node::ForAllSlots& f) {
            for (int slot : resolve_scope(f.scope, env, k, l))
              mark[static_cast<std::size_t>(slot)] = 1;
          },
          [&](const node::AllDifferentSlots& a) {
            const int i = resolve_instance(a.instance, env);
            for (int j = 0; j < l; ++j) mark[static_cast<std::size_t>((i - 1) * l + j)] = 1;
          },
      },
      e.node());
}

std::vector<int> instance_slots(int instance, int l) {
  std::vector<int> out(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) out[static_cast<std::size_t>(j)] = (instance - 1) * l + j;
  return out;
}

// Integer band for `sum op bound` without an upper clip.
std::optional<CountBand> sum_band(CmpOp op, const Rational& bound) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  CountBand b{-kInf, kInf};
  switch (op) {
    case CmpOp::le: b.hi = bound.floor(); break;
    case CmpOp::lt: b.hi = bound.ceil() - 1; break;
    case CmpOp::ge: b.lo = bound.ceil(); break;
    case CmpOp::gt: b.lo = bound.floor() + 1; break;
    case CmpOp::eq:
      if (!bound.is_integer()) return CountBand{1, 0};
      b.lo = b.hi = bound.num();
      break;
    case CmpOp::ne: return std::nullopt;
  }
  return b;
}

}  // namespace

// Flattens one REQ/C member into unary filters and propagators.
class Compiler {
 public:
  Compiler(const MultiConfigTask& task, PropagatorSet& out) : task_(task), out_(out) {}

  void constraint(const std::string& id, const Expr& e) {
    Bindings env;
    flatten(id, e, env);
  }

 private:
  int k() const { return task_.k(); }
  int l() const { return task_.l(); }
  const QuestionBank& bank() const { return task_.bank(); }

  void flatten(const std::string& id, const Expr& e, Bindings& env) {
    std::visit(
        overloaded{
            [&](const node::Literal& lit) {
              if (!lit.value) add(std::make_unique<FailPropagator>(id));
            },
            [&](const node::And& a) {
              for (const auto& x : a.args) flatten(id, x, env);
            },
            [&](const std::shared_ptr<const node::ForAllInstances>& f) {
              for (int i = 1; i <= k(); ++i) {
                env.push_back(i);
                flatten(id, f->body, env);
                env.pop_back();
              }
            },
            [&](const std::shared_ptr<const node::PairwiseInstances>& p) {
              for (int i = 1; i <= k(); ++i)
                for (int i2 = i + 1; i2 <= k(); ++i2) {
                  env.push_back(i);
                  env.push_back(i2);
                  flatten(id, p->body, env);
                  env.pop_back();
                  env.pop_back();
                }
            },
            [&](const node::ForAllSlots& f) {
              unary(id, resolve_scope(f.scope, env, k(), l()), predicate_mask(bank(), f.pred));
            },
            [&](const node::AllDifferentSlots& a) {
              add(std::make_unique<AllDifferentPropagator>(
                  id, instance_slots(resolve_instance(a.instance, env), l())));
            },
            [&](const node::Compare& c) { compare(id, c.op, c.lhs, c.rhs, e, env); },
            [&](const std::shared_ptr<const node::Not>& n) {
              if (const auto* c = std::get_if<node::Compare>(&n->arg.node())) {
                compare(id, negation(c->op), c->lhs, c->rhs, e, env);
              } else if (const auto* inner =
                             std::get_if<std::shared_ptr<const node::Not>>(&n->arg.node())) {
                flatten(id, (*inner)->arg, env);
              } else {
                checker(id, e, env);
              }
            },
            [&](const node::Or&) { checker(id, e, env); },
        },
        e.node());
  }

  void compare(const std::string& id, CmpOp op, const Term& lhs_in, const Term& rhs_in,
               const Expr& whole, Bindings& env) {
    const Term* lhs = &lhs_in;
    const Term* rhs = &rhs_in;
    const bool lconst = std::holds_alternative<term::Const>(*lhs);
    const bool rconst = std::holds_alternative<term::Const>(*rhs);
    if (lconst && rconst) {
      if (!multiconf::compare(op, std::get<term::Const>(*lhs).value,
                              std::get<term::Const>(*rhs).value))
        add(std::make_unique<FailPropagator>(id));
      return;
    }
    if (lconst) {
      std::swap(lhs, rhs);
      op = mirror(op);
    } else if (!rconst) {
      checker(id, whole, env);
      return;
    }
    const Rational bound = std::get<term::Const>(*rhs).value;

    if (const auto* c = std::get_if<term::Count>(lhs)) {
      auto slots = resolve_scope(c->scope, env, k(), l());
      auto band = count_band(op, bound, static_cast<std::int64_t>(slots.size()));
      if (!band) return checker(id, whole, env);
      return count(id, std::move(slots), predicate_mask(bank(), c->pred), *band);
    }
    if (const auto* s = std::get_if<term::Share>(lhs)) {
      auto slots = resolve_scope(s->scope, env, k(), l());
      auto band = share_band(op, bound, static_cast<std::int64_t>(slots.size()));
      if (!band) return checker(id, whole, env);
      return count(id, std::move(slots), predicate_mask(bank(), s->pred), *band);
    }
    if (const auto* s = std::get_if<term::Sum>(lhs)) {
      auto band = sum_band(op, bound);
      if (!band) return checker(id, whole, env);
      if (band->empty()) return add(std::make_unique<FailPropagator>(id));
      std::vector<std::int64_t> weight(static_cast<std::size_t>(bank().p()));
      for (int v = 1; v <= bank().p(); ++v)
        weight[static_cast<std::size_t>(v - 1)] = bank().question(v).attribute(s->attr);
      return add(std::make_unique<SumPropagator>(id, resolve_scope(s->scope, env, k(), l()),
                                                 std::move(weight), band->lo, band->hi));
    }
    if (const auto* o = std::get_if<term::Overlap>(lhs)) {
      const int a = resolve_instance(o->a, env);
      const int b = resolve_instance(o->b, env);
      auto band = count_band(op, bound, l());
      if (a == b || !band) return checker(id, whole, env);
      if (band->empty()) return add(std::make_unique<FailPropagator>(id));
      if (band->lo <= 0 && band->hi >= l()) return;
      return add(std::make_unique<OverlapPropagator>(
          id, instance_slots(a, l()), instance_slots(b, l()), band->lo, band->hi,
          task_.unique_instance(a) && task_.unique_instance(b)));
    }
    if (const auto* s = std::get_if<term::SlotAttr>(lhs)) {
      Bitset keep(static_cast<std::size_t>(bank().p()));
      for (int v = 1; v <= bank().p(); ++v)
        if (multiconf::compare(op, bank().question(v).attribute(s->attr), bound))
          keep.set(static_cast<std::size_t>(v - 1));
      const int i = resolve_instance(s->instance, env);
      return unary(id, {(i - 1) * l() + s->slot - 1}, std::move(keep));
    }
    checker(id, whole, env);
  }

  void count(const std::string& id, std::vector<int> slots, Bitset mask, CountBand band) {
    const auto n = static_cast<std::int64_t>(slots.size());
    if (band.empty()) return add(std::make_unique<FailPropagator>(id));
    if (band.lo <= 0 && band.hi >= n) return;
    if (band.hi <= 0) return unary(id, std::move(slots), mask.complement());
    if (band.lo >= n) return unary(id, std::move(slots), std::move(mask));
    const bool distinct = static_cast<int>(n) == l() && slots.front() % l() == 0 &&
                          slots.back() == slots.front() + l() - 1 &&
                          task_.unique_instance(slots.front() / l() + 1);
    auto& same = counts_[{slots, mask}];
    if (same.ids.empty()) {
      same.band = band;
      same.mask = mask;
      same.distinct = distinct;
    } else {
      same.band = {std::max(same.band.lo, band.lo), std::min(same.band.hi, band.hi)};
    }
    same.ids.push_back(id);
    add(std::make_unique<CountPropagator>(id, std::move(slots), std::move(mask), band.lo,
                                          band.hi, distinct));
  }

 public:
  // Counts over the same slots and values from different constraints only
  // meet in search unless their bands are intersected up front.
  void merge_counts() {
    for (auto& [key, c] : counts_) {
      if (c.ids.size() < 2) continue;
      std::string id = "merged";
      for (const auto& x : c.ids) id += ":" + x;
      if (c.band.empty()) {
        add(std::make_unique<FailPropagator>(id));
      } else {
        add(std::make_unique<CountPropagator>(id, key.first, c.mask, c.band.lo, c.band.hi,
                                              c.distinct));
      }
    }
  }

 private:
  struct SharedCount {
    CountBand band;
    Bitset mask;
    bool distinct = false;
    std::vector<std::string> ids;
  };
  std::map<std::pair<std::vector<int>, Bitset>, SharedCount> counts_;

  void checker(const std::string& id, const Expr& e, Bindings& env) {
    std::vector<char> mark(static_cast<std::size_t>(task_.slot_count()), 0);
    mark_slots(e, env, k(), l(), mark);
    std::vector<int> slots;
    for (int s = 0; s < task_.slot_count(); ++s)
      if (mark[static_cast<std::size_t>(s)]) slots.push_back(s);
    add(std::make_unique<CheckerPropagator>(id, std::move(slots), e, env, task_.shared_bank()));
  }

  void unary(const std::string& id, std::vector<int> slots, Bitset keep) {
    out_.unary_.push_back(UnaryFilter{id, std::move(slots), std::move(keep)});
  }

  void add(std::unique_ptr<Propagator> p) { out_.props_.push_back(std::move(p)); }

  const MultiConfigTask& task_;
  PropagatorSet& out_;
};

PropagatorSet PropagatorSet::compile(const MultiConfigTask& task, CompileOptions opts) {
  PropagatorSet set;
  set.task_ = std::make_shared<const MultiConfigTask>(task);
  Compiler compiler(*set.task_, set);
  for (const auto& c : set.task_->all_constraints()) compiler.constraint(c.id, c.expr);
  compiler.merge_counts();

  if (opts.symmetry_breaking && !task.references_slot_index()) {
    for (int i = 1; i <= task.k(); ++i) {
      if (!task.unique_instance(i) || task.l() < 2) continue;
      set.props_.push_back(std::make_unique<AscendingPropagator>(
          "symmetry:" + std::to_string(i), instance_slots(i, task.l())));
      set.symmetry_active_ = true;
    }
  }

  set.watchers_.assign(static_cast<std::size_t>(task.slot_count()), {});
  for (std::size_t n = 0; n < set.props_.size(); ++n)
    for (int s : set.props_[n]->scope())
      set.watchers_[static_cast<std::size_t>(s)].push_back(static_cast<int>(n));
  return set;
}

DomainStore PropagatorSet::init_store() const {
  DomainStore store(task_->k(), task_->l(), task_->bank().p());
  for (const auto& f : unary_)
    for (int s : f.slots) store.restrict_to(s, f.keep);
  store.take_touched();
  return store;
}

namespace {

bool run_fixpoint(DomainStore& store, std::span<const std::unique_ptr<Propagator>> props,
                  const std::vector<std::vector<int>>& watchers, bool from_scratch,
                  Schedule schedule) {
  if (store.failed()) return false;
  std::deque<int> queue;
  std::vector<char> queued(props.size(), 0);
  auto push = [&](int n) {
    if (!queued[static_cast<std::size_t>(n)]) {
      queued[static_cast<std::size_t>(n)] = 1;
      queue.push_back(n);
    }
  };
  auto wake = [&]() {
    for (int s : store.take_touched())
      for (int n : watchers[static_cast<std::size_t>(s)]) push(n);
  };
  if (from_scratch)
    for (std::size_t n = 0; n < props.size(); ++n) push(static_cast<int>(n));
  wake();
  while (!queue.empty()) {
    int n = 0;
    if (schedule == Schedule::fifo) {
      n = queue.front();
      queue.pop_front();
    } else {
      n = queue.back();
      queue.pop_back();
    }
    queued[static_cast<std::size_t>(n)] = 0;
    const Outcome o = props[static_cast<std::size_t>(n)]->propagate(store);
    if (o == Outcome::failed || store.failed()) {
      store.mark_failed();
      store.take_touched();
      return false;
    }
    wake();
  }
  return true;
}

}  // namespace

bool PropagatorSet::fixpoint(DomainStore& store, bool from_scratch, Schedule schedule) const {
  return run_fixpoint(store, props_, watchers_, from_scratch, schedule);
}

bool fixpoint(DomainStore& store, std::span<const std::unique_ptr<Propagator>> props,
              Schedule schedule) {
  std::vector<std::vector<int>> watchers(static_cast<std::size_t>(store.slot_count()));
  for (std::size_t n = 0; n < props.size(); ++n)
    for (int s : props[n]->scope()) watchers[static_cast<std::size_t>(s)].push_back(static_cast<int>(n));
  return run_fixpoint(store, props, watchers, true, schedule);
}

DomainStore init_store(const MultiConfigTask& task) {
  return PropagatorSet::compile(task).init_store();
}

std::optional<UnaryFilter> compile_unary(const Expr& expr, const MultiConfigTask& task) {
  PropagatorSet set;
  set.task_ = std::make_shared<const MultiConfigTask>(task);
  Compiler compiler(task, set);
  compiler.constraint("unary", expr);
  if (!set.props_.empty() || set.unary_.empty()) return std::nullopt;
  UnaryFilter merged = set.unary_.front();
  for (std::size_t n = 1; n < set.unary_.size(); ++n) {
    if (!(set.unary_[n].keep == merged.keep)) return std::nullopt;
    merged.slots.insert(merged.slots.end(), set.unary_[n].slots.begin(), set.unary_[n].slots.end());
  }
  std::sort(merged.slots.begin(), merged.slots.end());
  merged.slots.erase(std::unique(merged.slots.begin(), merged.slots.end()), merged.slots.end());
  return merged;
}

}  // namespace multiconf
