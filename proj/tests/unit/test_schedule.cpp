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

#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "roars/heuristics.hpp"
#include "roars/schedule.hpp"

using namespace roars;
using testing::make_instance;
using testing::single;

namespace {

bool has_edge(const ScheduleDag &dag, int from, int to) {
    const auto &e = dag.edges();
    return std::find(e.begin(), e.end(), Edge{from, to}) != e.end();
}

bool has_kind(const std::vector<Violation> &vs, ViolationKind k) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation &v) { return v.kind == k; });
}

} // namespace

TEST_CASE("on-time tasks form a star from the root") {
    const auto inst = make_instance({single(0, 5, 0b001), single(2, 4, 0b010), single(3, 6, 0b100)}, 1, 3);
    const std::vector<Assignment> a{{0, 0, 0}, {1, 0, 2}, {2, 0, 3}};
    const auto dag = ScheduleDag::build(inst, a);
    CHECK(dag.edges() == std::vector<Edge>{{root_node(0), 0}, {root_node(0), 1}, {root_node(0), 2}});
    CHECK(dag.total_slowdown() == doctest::Approx(3.0));
    CHECK(validate(dag).empty());
}

TEST_CASE("a task starting at its predecessor's completion hangs off it") {
    const auto inst = make_instance({single(0, 5), single(2, 3)});
    const std::vector<Assignment> a{{0, 0, 0}, {1, 0, 5}};
    const auto dag = ScheduleDag::build(inst, a);
    CHECK(has_edge(dag, 0, 1));
    CHECK_FALSE(has_edge(dag, root_node(0), 1));
    CHECK(dag.parents(1) == std::vector<int>{0});
}

TEST_CASE("both edge rules can hold at once") {
    const auto inst = make_instance({single(0, 5), single(5, 3)});
    const auto dag = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 5}});
    CHECK(dag.parents(1) == std::vector<int>{root_node(0), 0});
}

TEST_CASE("a task delayed by something else than a task hangs off the root") {
    const auto inst = make_instance({single(0, 5)});
    const auto dag = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 4}});
    CHECK(dag.parents(0) == std::vector<int>{root_node(0)});
    CHECK(validate(dag).empty());
}

TEST_CASE("build rejects infeasible assignments") {
    const auto inst = make_instance({single(0, 5), single(0, 5), single(0, 5, 0b10)}, 1, 2);
    auto kind_of = [&](std::vector<Assignment> a) {
        try {
            ScheduleDag::build(inst, a);
        } catch (const InfeasibleAssignment &e) {
            return e.violation().kind;
        }
        FAIL("expected an infeasible assignment");
        return ViolationKind::Edge;
    };
    CHECK(kind_of({{0, 0, 0}, {1, 0, 3}}) == ViolationKind::Resource);
    CHECK(kind_of({{0, 0, 0}, {1, 0, 50}}) == ViolationKind::Deadline); // deadline 45
    // Different filters may overlap.
    CHECK_NOTHROW(ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}, {2, 0, 0}}));
    try {
        ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 3}});
    } catch (const InfeasibleAssignment &e) {
        CHECK(std::string(e.what()).find("resource") != std::string::npos);
    }
}

TEST_CASE("cadence gap is enforced") {
    // Two exposures of 5 with a gap of 10: A = 0 and 15.
    const auto inst = make_instance({{0, 30, 5, 10, 0b1, -1}});
    REQUIRE(inst->num_tasks() == 2);
    CHECK_NOTHROW(ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 3}, {1, 0, 18}}));
    try {
        ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 3}, {1, 0, 17}});
        FAIL("expected a sibling violation");
    } catch (const InfeasibleAssignment &e) {
        CHECK(e.violation().kind == ViolationKind::Sibling);
    }
}

TEST_CASE("validate reports hand-made defects") {
    const auto inst = make_instance({single(0, 5), single(10, 5)});
    SUBCASE("cycle") {
        const auto dag = ScheduleDag::from_parts(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 10}},
                                                 {{0, 1}, {1, 0}});
        CHECK(has_kind(validate(dag), ViolationKind::Cycle));
    }
    SUBCASE("start before arrival") {
        const auto dag = ScheduleDag::from_parts(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 8}},
                                                 {{root_node(0), 0}, {root_node(0), 1}});
        CHECK(has_kind(validate(dag), ViolationKind::Arrival));
    }
    SUBCASE("missing edge") {
        const auto dag = ScheduleDag::from_parts(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 10}},
                                                 {{root_node(0), 0}});
        CHECK_FALSE(validate(dag).empty());
    }
}

TEST_CASE("slowdown arithmetic") {
    const auto inst = make_instance({single(10, 5)});
    CHECK(ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 10}}).slowdown(0) == doctest::Approx(1.0));
    CHECK(ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 20}}).slowdown(0) == doctest::Approx(3.0));
    // Scaling A, E and the delay together keeps the slowdown.
    const auto scaled = make_instance({single(20, 10, 0b1, 80)}, 1, 1, 120);
    CHECK(ScheduleDag::build(scaled, std::vector<Assignment>{{0, 0, 40}}).slowdown(0) == doctest::Approx(3.0));
}

TEST_CASE("average_slowdown needs every task") {
    const auto inst = make_instance({single(0, 5), single(0, 5)});
    const auto dag = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}});
    CHECK_THROWS_AS(average_slowdown(dag), UnassignedTasks);
    CHECK(dag.mean_slowdown() == doctest::Approx(1.0));
    CHECK(average_slowdown(ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 5}})) ==
          doctest::Approx(1.5));
}

TEST_CASE("immediate cost") {
    const auto inst = make_instance({single(10, 5)});
    const auto late = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 15}});
    const auto on_time = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 10}});
    CHECK(immediate_cost(late, late) == 0.0);
    CHECK(immediate_cost(late, on_time) == doctest::Approx(1.0));
    const auto other = make_instance({single(10, 5), single(0, 3)});
    CHECK_THROWS_AS(immediate_cost(late, ScheduleDag::build(other, std::vector<Assignment>{{0, 0, 10}, {1, 0, 0}})),
                    std::invalid_argument);
}

TEST_CASE("embedding") {
    CHECK(embedding_length(1, 3, 20, false) == 64);
    CHECK(embedding_length(5, 3, 20, true) == 316);

    const auto inst = make_instance({single(4, 3, 0b101)}, 1, 3);
    const auto dag = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 6}});
    const auto e = embed(dag, 0, false, 20);
    REQUIRE(e.size() == 64);
    const std::vector<double> rho{1, 0, 1};
    CHECK(std::vector<double>(e.begin(), e.begin() + 3) == rho);
    for (int step = 0; step < 20; ++step)
        for (int f = 0; f < 3; ++f) {
            const double want = step < 3 ? rho[static_cast<std::size_t>(f)] : 0.0;
            CHECK(e[static_cast<std::size_t>(3 + 3 * step + f)] == want);
        }
    CHECK(e.back() == doctest::Approx(dag.slowdown(0)));
}

TEST_CASE("heuristic schedules pass validation") {
    GenConfig g;
    g.arrival_steps = 60;
    for (int sites : {1, 3}) {
        g.num_sites = sites;
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            const auto inst = Instance::build(generate_scenario(g, seed), false);
            for (auto rule : {TaskRule::FCFS, TaskRule::STF, TaskRule::RIP}) {
                const auto r = schedule_online_heuristic(inst, rule, sites > 1 ? SiteRule::BestQuality : SiteRule::None);
                const auto vs = validate(r.dag);
                CHECK_MESSAGE(vs.empty(), "seed " << seed << ": " << (vs.empty() ? "" : vs.front().message));
                CHECK(r.dag.size() + static_cast<int>(r.dropped.size()) == inst->num_tasks());
            }
        }
    }
}

TEST_CASE("schedule dump lists every scheduled task") {
    const auto inst = make_instance({single(0, 5), single(1, 2)});
    const auto dag = ScheduleDag::build(inst, std::vector<Assignment>{{0, 0, 0}, {1, 0, 5}});
    const auto dump = schedule_dump(dag);
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 2);
    CHECK(dump.find("\"task_id\":1") != std::string::npos);
}
