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

// The OpenMP kernels against their serial references.

#include <atomic>

#include "doctest.h"
#include "roars/bench.hpp"
#include "roars/parallel.hpp"

using namespace roars;

TEST_CASE("visibility table") {
    GenConfig g;
    g.num_sites = 5;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto sc = generate_scenario(g, seed);
        CHECK(parallel::visibility_table_serial(sc) == parallel::visibility_table_omp(sc));
    }
    const auto sc = generate_scenario(GenConfig{}, 1);
    CHECK(Instance::build(sc, true)->visibility == Instance::build(sc, false)->visibility);
}

TEST_CASE("index loops visit every index once") {
    std::vector<std::atomic<int>> hits(257);
    parallel::for_each_index_omp(257, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto &h : hits) CHECK(h.load() == 1);
    std::vector<int> order;
    parallel::for_each_index_serial(5, [&](int i) { order.push_back(i); });
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
    parallel::for_each_index_omp(0, [](int) { FAIL("no iterations expected"); });
}

TEST_CASE("benchmark loops agree") {
    const auto c = bench_config_from_json(R"({
        "scenario": {"arrival_steps": 60, "num_sites": 2},
        "schedulers": ["SQTF", "RPTF", "Offline", "Rewrite-random"],
        "instances": 4, "seed": 3})");
    CHECK(rows_csv(run_benchmark(c, true)) == rows_csv(run_benchmark(c, false)));
}
