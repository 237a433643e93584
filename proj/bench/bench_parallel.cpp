/*
Copyright 2026 The ROARS Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


// Serial reference loops against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "roars/bench.hpp"
#include "roars/parallel.hpp"

namespace {

using namespace roars;

Scenario five_site_scenario() {
    GenConfig gen;
    gen.arrival_steps = 60;
    gen.num_sites = 5;
    return generate_scenario(gen, 1);
}

void BM_VisibilityTableSerial(benchmark::State &state) {
    const auto s = five_site_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(parallel::visibility_table_serial(s));
}
BENCHMARK(BM_VisibilityTableSerial)->Unit(benchmark::kMillisecond);

void BM_VisibilityTableOmp(benchmark::State &state) {
    const auto s = five_site_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(parallel::visibility_table_omp(s));
}
BENCHMARK(BM_VisibilityTableOmp)->Unit(benchmark::kMillisecond);

BenchConfig small_benchmark() {
    BenchConfig c;
    c.ablations = {{"quarter", R"({"arrival_steps": 60})"}};
    c.schedulers = {"FCFS", "STF", "EDD", "Offline", "Rewrite-random"};
    c.instances = 8;
    c.search.num_steps = 20;
    return c;
}

void BM_BenchmarkLoopSerial(benchmark::State &state) {
    const auto c = small_benchmark();
    for (auto _ : state) benchmark::DoNotOptimize(run_benchmark(c, false));
}
BENCHMARK(BM_BenchmarkLoopSerial)->Unit(benchmark::kMillisecond);

void BM_BenchmarkLoopOmp(benchmark::State &state) {
    const auto c = small_benchmark();
    for (auto _ : state) benchmark::DoNotOptimize(run_benchmark(c, true));
}
BENCHMARK(BM_BenchmarkLoopOmp)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
