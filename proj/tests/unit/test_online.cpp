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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "roars/bench.hpp"
#include "roars/training.hpp"

using namespace roars;
using testing::make_instance;
using testing::single;

namespace {

std::vector<SchedulerSpec> every_scheduler(const std::shared_ptr<const PolicyNet> &net) {
    std::vector<SchedulerSpec> out;
    for (auto rule : {TaskRule::FCFS, TaskRule::STF, TaskRule::EDD, TaskRule::SPT, TaskRule::RIP})
        out.push_back(SchedulerSpec::heuristic(rule));
    out.push_back(SchedulerSpec::offline());
    out.push_back(SchedulerSpec::random_search(SearchConfig{}));
    out.push_back(SchedulerSpec::roars(net, SearchConfig{}));
    return out;
}

std::shared_ptr<const PolicyNet> small_net(int sites = 1) {
    PolicyDims d;
    d.hidden = 8;
    d.num_sites = sites;
    d.distributed = sites > 1;
    return std::make_shared<const PolicyNet>(d, 4);
}

} // namespace

TEST_CASE("empty scenario") {
    const auto inst = Instance::build(testing::make_scenario({}, 1, 3), false);
    for (const auto &spec : every_scheduler(small_net())) {
        const auto r = run_online(inst, spec);
        CHECK(r.dag.size() == 0);
        CHECK(r.dropped.empty());
    }
}

TEST_CASE("one task is served on time by every scheduler") {
    const auto inst = make_instance({single(5, 4)}, 1, 3);
    for (const auto &spec : every_scheduler(small_net())) {
        const auto r = run_online(inst, spec);
        REQUIRE(r.dag.size() == 1);
        CHECK(r.avg_slowdown() == 1.0);
    }
}

TEST_CASE("rewriting schedulers stay feasible and never revise the past") {
    GenConfig g;
    g.arrival_steps = 60;
    const auto net = small_net();
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = Instance::build(generate_scenario(g, seed), false);
        for (const auto &spec : {SchedulerSpec::random_search(SearchConfig{}), SchedulerSpec::roars(net, SearchConfig{})}) {
            const auto r = run_online(inst, spec);
            CHECK(validate(r.dag).empty());
            CHECK(r.dag.size() + static_cast<int>(r.dropped.size()) == inst->num_tasks());
            for (int j : r.dag.tasks()) CHECK(r.dag.start_of(j) >= inst->tasks[static_cast<std::size_t>(j)].arrival);
            const auto again = run_online(inst, spec);
            CHECK(again.dag.assignments() == r.dag.assignments());
        }
    }
}

TEST_CASE("report slowdown equals the schedule's") {
    GenConfig g;
    g.arrival_steps = 60;
    const auto inst = Instance::build(generate_scenario(g, 2), false);
    const auto r = run_online(inst, SchedulerSpec::heuristic(TaskRule::FCFS));
    CHECK(r.avg_slowdown() == r.dag.mean_slowdown());
    CHECK(r.avg_slowdown() >= 1.0);
}

TEST_CASE("policy dimensions must match the scenario") {
    const auto inst = make_instance({single(0, 3)}, 2, 3);
    CHECK_THROWS_AS(run_online(inst, SchedulerSpec::roars(small_net(1), SearchConfig{})), std::invalid_argument);
    CHECK_THROWS_AS(run_online(inst, SchedulerSpec::heuristic(TaskRule::FCFS), 0), std::invalid_argument);
}

TEST_CASE("scheduler names") {
    const auto net = small_net();
    CHECK(parse_scheduler("STF", nullptr, {}, PickMode::Greedy).name() == "STF");
    CHECK(parse_scheduler("SQTF", nullptr, {}, PickMode::Greedy).site_rule == SiteRule::BestQuality);
    CHECK(parse_scheduler("ROARS", net, {}, PickMode::Greedy).name() == "ROARS");
    CHECK(parse_scheduler("Offline", nullptr, {}, PickMode::Greedy).kind == SchedulerKind::Offline);
    CHECK_THROWS_AS(parse_scheduler("ROARS", nullptr, {}, PickMode::Greedy), std::invalid_argument);
    CHECK_THROWS_AS(parse_scheduler("LIFO", nullptr, {}, PickMode::Greedy), std::invalid_argument);
    const auto pairs = heuristic_pair_names();
    CHECK(pairs.size() == 10);
    CHECK(pairs.front() == "SQTF");
}

TEST_CASE("benchmark") {
    const std::string cfg = R"({
        "scenario": {"arrival_steps": 40},
        "schedulers": ["FCFS", "STF"],
        "instances": 3,
        "seed": 5
    })";
    const auto c = bench_config_from_json(cfg);
    const auto a = run_benchmark(c);
    CHECK(a.rows.size() == 6);
    CHECK(a.summary.size() == 2);
    const auto b = run_benchmark(c, false);
    CHECK(rows_csv(a) == rows_csv(b));
    CHECK(summary_csv(a) == summary_csv(b));
    CHECK(summary_svg(a) == summary_svg(b));
    CHECK(summary_svg(a).find("<svg") == 0);

    SUBCASE("ablations multiply the groups") {
        const auto c2 = bench_config_from_json(R"({
            "scenario": {"arrival_steps": 40},
            "ablations": [{"label": "long", "overrides": {"duration_long_fraction": 1.0}},
                          {"label": "short", "overrides": {"duration_long_fraction": 0.0}}],
            "schedulers": ["FCFS"], "instances": 2})");
        const auto r = run_benchmark(c2);
        CHECK(r.rows.size() == 4);
        CHECK(r.summary[0].ablation == "long");
        CHECK(r.summary[1].ablation == "short");
    }
    SUBCASE("failures are recorded per row") {
        auto c3 = c;
        c3.ablations[0].scenario_json = R"({"arrival_steps": 40, "num_sites": 2})";
        c3.schedulers = {"FCFS", "ROARS"};
        c3.checkpoint = (std::filesystem::temp_directory_path() / "roars_test_bench.json").string();
        save_checkpoint(*small_net(1), c3.checkpoint);
        const auto r = run_benchmark(c3);
        CHECK(r.summary[0].failures == 0);
        CHECK(r.summary[1].failures == 3);
        CHECK_FALSE(r.rows[1].error.empty());
    }
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("training is deterministic and improves on its start") {
    TrainConfig tc;
    tc.hidden = 8;
    tc.steps = 4;
    tc.batch = 4;
    tc.episode_steps = 5;
    tc.pool_size = 8;
    tc.val_every = 2;
    tc.val_instances = 3;
    GenConfig g;
    g.arrival_steps = 30;
    std::vector<CurveRow> seen;
    const auto a = train(tc, g, SearchConfig{}, [&](const CurveRow &r) { seen.push_back(r); });
    const auto b = train(tc, g, SearchConfig{});
    CHECK(a.last.params() == b.last.params());
    CHECK(curve_csv(a.curve) == curve_csv(b.curve));
    CHECK(a.curve.size() == 2);
    CHECK(seen.size() == 2);
    CHECK(a.last.train_step == 4);
    CHECK(a.best_val == std::min(a.curve[0].val_slowdown, a.curve[1].val_slowdown));
    CHECK(a.last.params() != PolicyNet(dims_for(g, 8), derive_seed(tc.seed, 0)).params());
    CHECK(curve_csv(a.curve).rfind("step,train_loss,L_w,L_u,val_slowdown\n", 0) == 0);
}

TEST_CASE("training config") {
    const auto tc = train_config_from_json(R"({"steps": 10, "batch": 2, "eval_mode": "greedy"})");
    CHECK(tc.steps == 10);
    CHECK(tc.batch == 2);
    CHECK(tc.eval_mode == PickMode::Greedy);
    CHECK(tc.hidden == 64);
    CHECK_THROWS_AS(train_config_from_json(R"({"batch": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(train_config_from_json(R"({"gamma": 1.5})"), std::invalid_argument);
}
