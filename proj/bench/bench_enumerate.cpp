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

// Serial DFS enumeration against the root-split OpenMP variant.

#include <benchmark/benchmark.h>

#include "multiconf/exam.hpp"
#include "multiconf/search.hpp"

namespace {

using namespace multiconf;

const ExamModel& exam_model() {
  static const ExamModel m = load_exam_model(MULTICONF_MODELS_DIR "/exam.json");
  return m;
}

SearchConfig config(std::size_t max_solutions) {
  SearchConfig cfg;
  cfg.seed = 7;
  cfg.max_solutions = max_solutions;
  cfg.node_limit = 200000;
  cfg.value_order = ValueOrder::seeded_shuffle;
  return cfg;
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto cfg = config(static_cast<std::size_t>(state.range(0)));
  std::size_t found = 0;
  for (auto _ : state) {
    auto r = enumerate(exam_model().task, cfg);
    found = r.solutions.size();
    benchmark::DoNotOptimize(r);
  }
  state.counters["solutions"] = static_cast<double>(found);
}

void BM_EnumerateParallel(benchmark::State& state) {
  const auto cfg = config(static_cast<std::size_t>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  std::size_t found = 0;
  for (auto _ : state) {
    auto r = enumerate_parallel(exam_model().task, cfg, threads);
    found = r.solutions.size();
    benchmark::DoNotOptimize(r);
  }
  state.counters["solutions"] = static_cast<double>(found);
}

}  // namespace

BENCHMARK(BM_EnumerateSerial)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)
    ->Args({1, 1})->Args({50, 1})->Args({50, 2})->Args({50, 4})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
