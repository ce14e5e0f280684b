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

// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "multiconf/cli.hpp"
#include "multiconf/diagnose.hpp"
#include "multiconf/exam.hpp"
#include "multiconf/propagate.hpp"
#include "multiconf/search.hpp"
#include "support/oracle.hpp"
#include "support/witnesses.hpp"

using namespace multiconf;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<MultiConfigTask> random_suite(std::uint64_t seed, int n,
                                          const testing::RandomTaskOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  std::vector<MultiConfigTask> out;
  while (static_cast<int>(out.size()) < n) out.push_back(testing::random_task(rng, opts));
  return out;
}

SearchConfig unbounded(bool symmetry, ValueOrder order = ValueOrder::lexicographic) {
  SearchConfig cfg;
  cfg.max_solutions = SearchConfig::kUnbounded;
  cfg.symmetry_breaking = symmetry;
  cfg.value_order = order;
  cfg.seed = 12345;
  return cfg;
}

Result ac1() {
  const auto start = Clock::now();
  const auto suite = random_suite(1001, 250);
  int mismatches = 0, solutions = 0;
  for (const auto& t : suite) {
    const auto brute = testing::brute_solutions(t);
    const auto got = enumerate(t, unbounded(false));
    const std::set<MultiConfiguration> a(brute.begin(), brute.end());
    const std::set<MultiConfiguration> b(got.solutions.begin(), got.solutions.end());
    if (a != b || b.size() != got.solutions.size() || !got.exhausted) ++mismatches;
    solutions += static_cast<int>(brute.size());
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << suite.size() << " tasks, " << solutions << " brute-force solutions, " << mismatches
    << " mismatching sets, " << secs << " s";
  return {mismatches == 0 && secs < 60, d.str()};
}

Result ac2() {
  int passed = 0, total = 0;
  std::string failed;
  for (const auto& w : testing::witnesses()) {
    const bool g = evaluate(w.expr, w.good, testing::witness_bank());
    const bool b = !evaluate(w.expr, w.bad, testing::witness_bank());
    passed += g + b;
    total += 2;
    if (!g || !b) failed += " " + w.rule;
  }
  std::ostringstream d;
  d << testing::witnesses().size() << " rules, " << passed << "/" << total << " checks"
    << (failed.empty() ? "" : ", failing:" + failed);
  return {passed == total && total == 22, d.str()};
}

// l questions; the first `hits` satisfy the predicate (type 1 and level 3).
QuestionBank graded(int l, int hits) {
  std::vector<Question> qs;
  for (int v = 1; v <= l; ++v) qs.push_back({v, v <= hits ? 1 : 3, v <= hits ? 3 : 1, 1});
  return QuestionBank(qs, 3, 3);
}

MultiConfiguration identity(int l) {
  std::vector<int> ids;
  for (int v = 1; v <= l; ++v) ids.push_back(v);
  return MultiConfiguration(1, l, ids);
}

// Accepted counts under evaluation, under the compiled count band, and by the
// solver on a task pinning the count to c.
std::set<int> accepted(int l, const std::function<Expr(const QuestionBank&)>& make,
                       const Predicate& pred, std::string& disagreement) {
  std::set<int> out;
  for (int c = 0; c <= l; ++c) {
    const QuestionBank bank = graded(l, c);
    const bool ev = evaluate(make(bank), identity(l), bank);
    const QuestionBank two({{1, 1, 3, 1}, {2, 3, 1, 1}}, 3, 3);
    const auto pin = cx::compare(CmpOp::eq, cx::count(Scope::of(InstanceRef::literal(1)), pred),
                                 cx::constant(c));
    const auto t = build_task(two, 1, l, {}, {{"t", make(two), ""}, {"pin", pin, ""}});
    const bool solved = solve(t, {}).status == SearchStatus::sat;
    if (ev != solved) disagreement += " c=" + std::to_string(c);
    if (ev) out.insert(c);
  }
  return out;
}

Result ac3() {
  std::string dis;
  const auto r1 = accepted(10, [](const QuestionBank& b) {
    return tmpl_share_max(b, 1, {1}, Rational::parse("0.3"));
  }, Predicate::in(Attribute::qtype, {1}), dis);
  const auto c7 = accepted(50, [](const QuestionBank& b) {
    return tmpl_share_range(b, 1, 3, Rational::parse("0.16"), Rational::parse("0.18"));
  }, Predicate::in(Attribute::level, {3}), dis);
  const bool band_ok = share_band(CmpOp::le, Rational::parse("0.3"), 10) == CountBand{0, 3} &&
                       share_band(CmpOp::ge, Rational::parse("0.16"), 50) == CountBand{8, 50} &&
                       share_band(CmpOp::le, Rational::parse("0.18"), 50) == CountBand{0, 9};
  const std::set<int> want_r1{0, 1, 2, 3};
  const std::set<int> want_c7{8, 9};
  std::ostringstream d;
  d << "0.3 at l=10 accepts {";
  for (int c : r1) d << (c ? "," : "") << c;
  d << "}; [0.16,0.18] at l=50 accepts {";
  bool first = true;
  for (int c : c7) d << (first ? "" : ",") << c, first = false;
  d << "}; compiled bands " << (band_ok ? "exact" : "WRONG")
    << (dis.empty() ? "" : "; evaluator/solver disagree at" + dis);
  return {r1 == want_r1 && c7 == want_c7 && band_ok && dis.empty(), d.str()};
}

Result ac4() {
  const auto suite = random_suite(2002, 250);
  std::mt19937_64 rng(4);
  int violations = 0, failed = 0, probes = 0;
  for (const auto& t : suite) {
    const auto sols = testing::brute_solutions(t);
    const auto props = PropagatorSet::compile(t);
    // Root store, then one random decision below it.
    for (int round = 0; round < 2; ++round) {
      DomainStore s = props.init_store();
      std::vector<MultiConfiguration> live = sols;
      if (round == 1) {
        const int flat = static_cast<int>(rng() % static_cast<std::uint64_t>(t.slot_count()));
        const int v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(t.bank().p()));
        if (!s.domain(flat).test(static_cast<std::size_t>(v - 1))) continue;
        s.assign(flat, v);
        std::erase_if(live, [&](const MultiConfiguration& c) {
          return c.ids()[static_cast<std::size_t>(flat)] != v;
        });
      }
      ++probes;
      if (!props.fixpoint(s)) {
        ++failed;
        if (!live.empty()) ++violations;
        continue;
      }
      for (const auto& c : live)
        for (int f = 0; f < t.slot_count(); ++f)
          if (!s.domain(f).test(static_cast<std::size_t>(c.ids()[static_cast<std::size_t>(f)] - 1)))
            ++violations;
    }
  }
  std::ostringstream d;
  d << suite.size() << " tasks, " << probes << " fixpoints (" << failed << " failed), "
    << violations << " violations";
  return {violations == 0, d.str()};
}

Result ac5() {
  std::mt19937_64 rng(5005);
  testing::RandomTaskOptions opts;
  opts.template_rate = 0.55;
  opts.requirement_rate = 0.6;
  opts.max_l = 2;
  int tasks = 0, tried = 0, violations = 0, conflicts = 0, diags = 0;
  while (tasks < 120 && tried < 20000) {
    ++tried;
    const auto t = testing::random_task(rng, opts);
    if (t.requirements().empty()) continue;
    const testing::SubsetOracle oracle(t);
    std::vector<std::string> req, base;
    for (const auto& r : t.requirements()) req.push_back(r.id);
    for (const auto& c : t.constraints()) base.push_back(c.id);
    if (!oracle.consistent(base) || oracle.consistent(t.all_ids())) continue;
    ++tasks;

    auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
      a.insert(a.end(), b.begin(), b.end());
      return a;
    };
    auto without = [](const std::vector<std::string>& a, const std::vector<std::string>& drop) {
      std::vector<std::string> out;
      for (const auto& x : a)
        if (std::find(drop.begin(), drop.end(), x) == drop.end()) out.push_back(x);
      return out;
    };

    ConsistencyChecker checker(t);
    const auto ex = explore(checker, req, base);
    for (const auto& c : ex.conflicts) {
      ++conflicts;
      if (oracle.consistent(with(base, c.ids))) ++violations;
      for (const auto& x : c.ids)
        if (!oracle.consistent(with(base, without(c.ids, {x})))) ++violations;
    }
    std::set<std::set<std::string>> got;
    for (const auto& dg : ex.diagnoses) {
      ++diags;
      got.insert({dg.ids.begin(), dg.ids.end()});
      if (!oracle.consistent(with(base, without(req, dg.ids)))) ++violations;
      for (const auto& x : dg.ids)
        if (oracle.consistent(with(base, without(req, without(dg.ids, {x}))))) ++violations;
    }
    for (std::size_t n = 1; n < ex.diagnoses.size(); ++n)
      if (ex.diagnoses[n].ids.size() < ex.diagnoses[n - 1].ids.size()) ++violations;
    if (got != oracle.minimal_diagnoses(req, base)) ++violations;

    const auto fd = fast_diag(checker, req, base);
    if (!oracle.minimal_diagnoses(req, base).count({fd.ids.begin(), fd.ids.end()})) ++violations;
    const auto mc = min_conflict(checker, base, req);
    if (!mc || !oracle.minimal_conflicts(req, base).count({mc->ids.begin(), mc->ids.end()}))
      ++violations;
  }
  std::ostringstream d;
  d << tasks << " inconsistent tasks (" << tried << " drawn), " << conflicts << " conflicts, "
    << diags << " diagnoses, " << violations << " violations";
  return {tasks >= 100 && violations == 0, d.str()};
}

Result ac6() {
  testing::RandomTaskOptions opts;
  opts.force_unique = true;
  auto suite = random_suite(6006, 150, opts);
  for (int p = 2; p <= 5; ++p)
    for (int l = 1; l <= std::min(p, 3); ++l) {
      std::vector<Question> qs;
      for (int v = 1; v <= p; ++v) qs.push_back({v, 1, 1, 1});
      QuestionBank bank(qs);
      suite.push_back(build_task(bank, 2, l, {}, {{"u", tmpl_unique_per_exam(bank, l), ""}}));
    }
  int violations = 0, nonzero = 0;
  for (const auto& t : suite) {
    const auto full = enumerate(t, unbounded(false)).solutions.size();
    std::size_t perms = 1;
    for (int n = 2; n <= t.l(); ++n) perms *= static_cast<std::size_t>(n);
    std::size_t factor = 1;
    for (int i = 0; i < t.k(); ++i) factor *= perms;
    for (auto order : {ValueOrder::lexicographic, ValueOrder::seeded_shuffle}) {
      const auto r = enumerate(t, unbounded(true, order));
      if (r.symmetry_active != (t.l() >= 2) || r.solutions.size() * factor != full) ++violations;
    }
    nonzero += full > 0;
  }
  std::ostringstream d;
  d << suite.size() << " fixtures (" << nonzero << " satisfiable), both value orders, "
    << violations << " violations";
  return {violations == 0, d.str()};
}

Result ac7() {
  const auto dir = fs::temp_directory_path() / "multiconf_acceptance";
  fs::create_directories(dir);
  const std::string model = std::string(MULTICONF_MODELS_DIR) + "/exam.json";
  std::string outs[2], manifests[2];
  int codes[2];
  for (int n = 0; n < 2; ++n) {
    const auto out = dir / ("det_" + std::to_string(n) + ".json");
    std::ostringstream o, e;
    codes[n] = run_cli({"solve", model, "--out", out.string(), "--seed", "2024", "--max-solutions", "3"},
                       o, e);
    outs[n] = read(out);
    auto m = json::parse(read(out.string() + ".manifest.json"));
    m.erase("timing");
    manifests[n] = m.dump();
  }
  const bool same_out = outs[0] == outs[1] && !outs[0].empty();
  const bool same_manifest = manifests[0] == manifests[1];
  std::ostringstream d;
  d << "exit codes " << codes[0] << "/" << codes[1] << ", solution files "
    << (same_out ? "identical" : "DIFFER") << ", manifests without timing "
    << (same_manifest ? "identical" : "DIFFER");
  return {codes[0] == 0 && codes[1] == 0 && same_out && same_manifest, d.str()};
}

Result ac8() {
  const auto dir = fs::temp_directory_path() / "multiconf_acceptance";
  fs::create_directories(dir);
  const std::string model = std::string(MULTICONF_MODELS_DIR) + "/desk_scale.json";
  const auto out = dir / "desk.json";
  std::ostringstream o, e;
  const auto start = Clock::now();
  const int code = run_cli({"solve", model, "--out", out.string()}, o, e);
  const double secs = seconds_since(start);
  const auto m = load_exam_model(model);
  std::size_t exams = 0;
  bool has_nodes = false;
  try {
    const auto sols = json::parse(read(out))["solutions"];
    if (!sols.empty()) exams = sols[0]["exams"].size();
    const auto man = json::parse(read(out.string() + ".manifest.json"));
    has_nodes = man["outcome"].contains("nodes") && man["outcome"]["nodes"].get<std::uint64_t>() > 0;
  } catch (const std::exception&) {
  }
  std::ostringstream d;
  d << "p=" << m.bank->p() << " k=" << m.k << " l=" << m.l << ", exit " << code << ", " << exams
    << " exams in " << secs << " s, manifest nodes " << (has_nodes ? "recorded" : "MISSING");
  return {code == 0 && exams == 30 && m.bank->p() == 200 && m.l == 10 && secs < 5 && has_nodes,
          d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"AC1 oracle equivalence", ac1},      {"AC2 rule witnesses", ac2},
      {"AC3 boundary rationals", ac3},      {"AC4 propagation soundness", ac4},
      {"AC5 diagnosis minimality", ac5},    {"AC6 symmetry count law", ac6},
      {"AC7 determinism", ac7},             {"AC8 desk-scale performance", ac8},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
