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

#include "multiconf/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "multiconf/diagnose.hpp"
#include "multiconf/error.hpp"
#include "multiconf/exam.hpp"
#include "multiconf/propagate.hpp"
#include "multiconf/search.hpp"

namespace multiconf {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int n = 0; n < len; ++n)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[n]);
  return hex.str();
}

namespace {

namespace fs = std::filesystem;

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  out.close();
  return static_cast<bool>(out);
}

// External ids per exam; sorted when symmetry breaking made slot order
// meaningless.
std::vector<std::vector<int>> exams_of(const MultiConfiguration& conf, const QuestionBank& bank,
                                       bool sort_ids) {
  std::vector<std::vector<int>> exams;
  for (int i = 1; i <= conf.k(); ++i) {
    std::vector<int> ids;
    for (int v : conf.exam(i)) ids.push_back(bank.question(v).id);
    if (sort_ids) std::sort(ids.begin(), ids.end());
    exams.push_back(std::move(ids));
  }
  return exams;
}

std::string solutions_json(const SearchResult& res, const QuestionBank& bank) {
  json sols = json::array();
  for (const auto& conf : res.solutions) {
    json exams = json::array();
    const auto ids = exams_of(conf, bank, res.symmetry_active);
    for (std::size_t i = 0; i < ids.size(); ++i)
      exams.push_back({{"examinee", i + 1}, {"questions", ids[i]}});
    sols.push_back({{"exams", exams}});
  }
  return json{{"solutions", sols}}.dump(2) + "\n";
}

std::string solutions_csv(const SearchResult& res, const QuestionBank& bank) {
  std::ostringstream out;
  out << "solution_index,examinee,slot,question_id\n";
  for (std::size_t s = 0; s < res.solutions.size(); ++s) {
    const auto ids = exams_of(res.solutions[s], bank, res.symmetry_active);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = 0; j < ids[i].size(); ++j)
        out << s + 1 << ',' << i + 1 << ',' << j + 1 << ',' << ids[i][j] << '\n';
  }
  return out.str();
}

// Solutions file back to configurations over bank values. Shape or id
// problems are verification failures; unreadable files are input errors.
struct SolutionsFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

MultiConfiguration conf_from_ids(const std::vector<std::vector<int>>& exams,
                                 const MultiConfigTask& task, std::size_t index) {
  const std::string which = "solution " + std::to_string(index + 1);
  if (static_cast<int>(exams.size()) != task.k())
    throw VerificationError(which + ": expected " + std::to_string(task.k()) + " exams, found " +
                            std::to_string(exams.size()));
  std::vector<int> values;
  for (std::size_t i = 0; i < exams.size(); ++i) {
    if (static_cast<int>(exams[i].size()) != task.l())
      throw VerificationError(which + ", examinee " + std::to_string(i + 1) + ": expected " +
                              std::to_string(task.l()) + " questions");
    for (int id : exams[i]) {
      const auto v = task.bank().value_of(id);
      if (!v) throw VerificationError(which + ": question " + std::to_string(id) + " not in bank");
      values.push_back(*v);
    }
  }
  return MultiConfiguration(task.k(), task.l(), std::move(values));
}

std::vector<MultiConfiguration> read_solutions(const fs::path& path, const MultiConfigTask& task) {
  const auto text = slurp(path);
  if (!text) throw SolutionsFileError("cannot read " + path.string());
  std::vector<std::vector<std::vector<int>>> raw;
  if (path.extension() == ".csv") {
    std::istringstream in(*text);
    std::string line;
    std::getline(in, line);
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::size_t s = 0, i = 0, j = 0;
      int id = 0;
      char c1 = 0, c2 = 0, c3 = 0;
      if (!(row >> s >> c1 >> i >> c2 >> j >> c3 >> id) || c1 != ',' || c2 != ',' || c3 != ',' ||
          s == 0 || i == 0 || j == 0)
        throw SolutionsFileError(path.string() + ":" + std::to_string(lineno) + ": bad row");
      if (raw.size() < s) raw.resize(s);
      auto& sol = raw[s - 1];
      if (sol.size() < i) sol.resize(i);
      auto& exam = sol[i - 1];
      if (exam.size() < j) exam.resize(j, 0);
      exam[j - 1] = id;
    }
  } else {
    json doc;
    try {
      doc = json::parse(*text);
    } catch (const json::parse_error& e) {
      throw SolutionsFileError(path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("solutions") || !doc.at("solutions").is_array())
      throw SolutionsFileError(path.string() + ": expected {\"solutions\": [...]}");
    for (const auto& sol : doc.at("solutions")) {
      std::vector<std::vector<int>> exams;
      if (!sol.is_object() || !sol.contains("exams") || !sol.at("exams").is_array())
        throw SolutionsFileError(path.string() + ": solution without an exams array");
      for (const auto& exam : sol.at("exams")) {
        if (!exam.is_object() || !exam.contains("questions") ||
            !exam.at("questions").is_array())
          throw SolutionsFileError(path.string() + ": exam without a questions array");
        std::vector<int> ids;
        for (const auto& q : exam.at("questions")) {
          if (!q.is_number_integer())
            throw SolutionsFileError(path.string() + ": question ids must be integers");
          ids.push_back(q.get<int>());
        }
        const auto slot = exam.value("examinee", static_cast<int>(exams.size()) + 1);
        if (slot != static_cast<int>(exams.size()) + 1)
          throw VerificationError("exams must be listed by examinee 1..k");
        exams.push_back(std::move(ids));
      }
      raw.push_back(std::move(exams));
    }
  }
  std::vector<MultiConfiguration> out;
  for (std::size_t n = 0; n < raw.size(); ++n) out.push_back(conf_from_ids(raw[n], task, n));
  return out;
}

// --- subcommands -----------------------------------------------------------

int cmd_validate(const std::string& model_path, std::ostream& out) {
  const ExamModel m = load_exam_model(model_path);
  const PropagatorSet props = PropagatorSet::compile(m.task, {.symmetry_breaking = true});
  out << "model " << model_path << " is valid\n";
  out << "  bank: p=" << m.bank->p() << " categories=" << m.bank->q_bar()
      << " levels=" << m.bank->r() << (m.bank->remapped() ? " (ids remapped to 1..p)" : "")
      << "\n";
  out << "  instances: k=" << m.k << " l=" << m.l << "\n";
  out << "  " << m.task.requirements().size() << " requirements, " << m.task.constraints().size()
      << " constraints, " << props.propagators().size() << " propagators, "
      << props.unary_filters().size() << " unary filters"
      << (props.symmetry_active() ? ", symmetry breaking available" : "") << "\n";
  for (const auto& p : m.provenance) out << "  " << p.describe() << "\n";
  for (const auto& w : m.warnings) out << "warning: " << w << "\n";
  return kExitOk;
}

struct SolveOptions {
  std::string model;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::size_t max_solutions = 1;
  std::optional<std::uint64_t> node_limit;
  std::optional<std::int64_t> time_limit_ms;
  bool no_symmetry = false;
  std::string order = "seeded_shuffle";
  int threads = 1;
};

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const auto bytes = slurp(o.model);
  if (!bytes) {
    err << "error: cannot read " << o.model << "\n";
    return kExitInputError;
  }
  const ExamModel m = load_exam_model(o.model);
  for (const auto& w : m.warnings) err << "warning: " << w << "\n";

  SearchConfig cfg;
  cfg.seed = o.seed;
  cfg.max_solutions = o.max_solutions;
  cfg.node_limit = o.node_limit;
  if (o.time_limit_ms) cfg.time_limit = std::chrono::milliseconds(*o.time_limit_ms);
  cfg.symmetry_breaking = !o.no_symmetry;
  cfg.value_order = *parse_value_order(o.order);

  const SearchResult res =
      o.threads > 1 ? enumerate_parallel(m.task, cfg, o.threads) : enumerate(m.task, cfg);

  const std::string payload =
      o.format == "csv" ? solutions_csv(res, *m.bank) : solutions_json(res, *m.bank);
  if (!write_file(o.out, payload)) {
    err << "error: cannot write " << o.out << "\n";
    return kExitInputError;
  }

  json config{{"max_solutions", o.max_solutions},
              {"node_limit", o.node_limit ? json(*o.node_limit) : json(nullptr)},
              {"time_limit_ms", o.time_limit_ms ? json(*o.time_limit_ms) : json(nullptr)},
              {"symmetry_breaking", cfg.symmetry_breaking},
              {"value_order", to_string(cfg.value_order)},
              {"threads", o.threads},
              {"format", o.format}};
  json manifest{
      {"tool", "multiconf"},
      {"version", kVersion},
      {"command", "solve"},
      {"input", {{"path", o.model}, {"sha256", sha256_hex(*bytes)}}},
      {"seed", o.seed},
      {"config", config},
      {"outcome",
       {{"status", to_string(res.status)},
        {"solutions", res.solutions.size()},
        {"exhausted", res.exhausted},
        {"symmetry_active", res.symmetry_active},
        {"nodes", res.stats.nodes},
        {"failures", res.stats.failures},
        {"propagation_fixpoints", res.stats.propagation_fixpoints}}},
      {"output", {{"sha256", sha256_hex(payload)}}},
      {"timing", {{"elapsed_ms", res.stats.elapsed_ms}}},
  };
  const std::string manifest_path = o.out + ".manifest.json";
  if (!write_file(manifest_path, manifest.dump(2) + "\n")) {
    err << "error: cannot write " << manifest_path << "\n";
    return kExitInputError;
  }

  out << to_string(res.status) << ": " << res.solutions.size() << " solution(s), "
      << res.stats.nodes << " nodes, " << res.stats.failures << " failures, "
      << std::fixed << std::setprecision(1) << res.stats.elapsed_ms << " ms\n";
  out << "wrote " << o.out << " and " << manifest_path << "\n";
  switch (res.status) {
    case SearchStatus::sat:
      return kExitOk;
    case SearchStatus::unsat:
      out << "the model has no solution; run `multiconf diagnose " << o.model
          << "` to find the conflicting requirements\n";
      return kExitUnsat;
    case SearchStatus::unknown:
      out << "search limits reached before a solution was found\n";
      return kExitUnknown;
  }
  return kExitUnknown;
}

struct DiagnoseOptions {
  std::string model;
  std::string foreground = "requirements";
  std::size_t max_diagnoses = 10;
  std::uint64_t node_limit = CheckOptions{}.node_limit;
};

void print_set(std::ostream& out, const std::vector<std::string>& ids, const ExamModel& m) {
  out << "{";
  for (std::size_t n = 0; n < ids.size(); ++n) out << (n ? ", " : "") << ids[n];
  out << "}\n";
  for (const auto& id : ids)
    if (const Provenance* p = m.provenance_of(id)) out << "      " << p->describe() << "\n";
}

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out, std::ostream& err) {
  const ExamModel m = load_exam_model(o.model);
  std::vector<std::string> candidates;
  std::vector<std::string> background;
  if (o.foreground == "all") {
    candidates = m.task.all_ids();
  } else {
    for (const auto& r : m.task.requirements()) candidates.push_back(r.id);
    for (const auto& c : m.task.constraints()) background.push_back(c.id);
  }
  CheckOptions copts;
  copts.node_limit = o.node_limit;
  ConsistencyChecker checker(m.task, copts);
  Exploration ex;
  try {
    ex = explore(checker, candidates, background, o.max_diagnoses);
  } catch (const BackgroundInconsistent&) {
    err << "error: the constraints are inconsistent even without any requirement; rerun with "
           "--foreground all to diagnose them\n";
    return kExitBackgroundInconsistent;
  }
  if (ex.diagnoses.empty() && ex.conflicts.empty()) {
    out << "no conflicts: the model is consistent\n";
    return kExitOk;
  }
  out << "minimal conflicts:\n";
  for (std::size_t n = 0; n < ex.conflicts.size(); ++n) {
    // Name the background constraints each conflict clashes with.
    std::vector<std::string> ids = ex.conflicts[n].ids;
    if (!background.empty()) {
      try {
        if (auto with = min_conflict(checker, ids, background))
          ids.insert(ids.end(), with->ids.begin(), with->ids.end());
      } catch (const BackgroundInconsistent&) {
      }
    }
    out << "  " << n + 1 << ". ";
    print_set(out, ids, m);
  }
  out << "minimal diagnoses (remove one set to restore consistency):\n";
  for (std::size_t n = 0; n < ex.diagnoses.size(); ++n) {
    out << "  " << n + 1 << ". size " << ex.diagnoses[n].ids.size() << " ";
    print_set(out, ex.diagnoses[n].ids, m);
  }
  out << checker.solver_calls() << " consistency checks, " << checker.cache_hits()
      << " answered from cache\n";
  return kExitOk;
}

int cmd_stats(const std::string& solutions_path, const std::string& model_path,
              const std::string& json_out, std::ostream& out, std::ostream& err) {
  const ExamModel m = load_exam_model(model_path);
  std::vector<MultiConfiguration> sols;
  try {
    sols = read_solutions(solutions_path, m.task);
  } catch (const SolutionsFileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  const auto reports = report(sols, m.task);
  json all = json::array();
  for (std::size_t n = 0; n < reports.size(); ++n) {
    out << "solution " << n + 1 << "\n" << format_report(reports[n]);
    all.push_back(to_json(reports[n]));
  }
  if (reports.empty()) out << "no solutions in " << solutions_path << "\n";
  if (!json_out.empty() && !write_file(json_out, json{{"reports", all}}.dump(2) + "\n")) {
    err << "error: cannot write " << json_out << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-instance configuration solver for exam generation", "multiconf"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string model;
  auto* validate = app.add_subcommand("validate", "Parse and compile a model");
  validate->add_option("model", model, "Model JSON file")->required();

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Generate exam sets");
  solve_cmd->add_option("model", so.model, "Model JSON file")->required();
  solve_cmd->add_option("--out", so.out, "Solutions file")->required();
  solve_cmd->add_option("--format", so.format)->check(CLI::IsMember({"json", "csv"}));
  solve_cmd->add_option("--seed", so.seed, "Seed for the value order")->envname("MULTICONF_SEED");
  solve_cmd->add_option("--max-solutions", so.max_solutions)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--node-limit", so.node_limit);
  solve_cmd->add_option("--time-limit-ms", so.time_limit_ms);
  solve_cmd->add_flag("--no-symmetry", so.no_symmetry, "Disable symmetry breaking");
  solve_cmd->add_option("--order", so.order, "Value order")
      ->check(CLI::IsMember({"lexicographic", "seeded_shuffle"}));
  solve_cmd->add_option("--threads", so.threads, "Parallel root split when > 1")
      ->check(CLI::PositiveNumber);

  DiagnoseOptions dopt;
  auto* diag = app.add_subcommand("diagnose", "Explain why a model has no solution");
  diag->add_option("model", dopt.model, "Model JSON file")->required();
  diag->add_option("--foreground", dopt.foreground, "Which ids may be removed")
      ->check(CLI::IsMember({"requirements", "all"}));
  diag->add_option("--max-diagnoses", dopt.max_diagnoses)->check(CLI::PositiveNumber);
  diag->add_option("--node-limit", dopt.node_limit, "Per consistency check");

  std::string solutions_path;
  std::string stats_model;
  std::string stats_json;
  auto* stats = app.add_subcommand("stats", "Report on a solutions file");
  stats->add_option("solutions", solutions_path, "Solutions file (json or csv)")->required();
  stats->add_option("model", stats_model, "Model JSON file")->required();
  stats->add_option("--json", stats_json, "Also write the report as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*validate) return cmd_validate(model, out);
    if (*solve_cmd) return cmd_solve(so, out, err);
    if (*diag) return cmd_diagnose(dopt, out, err);
    if (*stats) return cmd_stats(solutions_path, stats_model, stats_json, out, err);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const CheckUnknown& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const std::logic_error& e) {
    err << "internal verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitInputError;
}

}  // namespace multiconf
