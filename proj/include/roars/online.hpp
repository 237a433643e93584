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

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "roars/heuristics.hpp"
#include "roars/policy.hpp"

namespace roars {

enum class SchedulerKind { Heuristic, Offline, Roars, RandomSearch };

struct SchedulerSpec {
    SchedulerKind kind = SchedulerKind::Heuristic;
    TaskRule task_rule = TaskRule::FCFS;
    SiteRule site_rule = SiteRule::None;
    std::shared_ptr<const PolicyNet> policy; // Roars only
    SearchConfig search;
    PickMode mode = PickMode::Greedy;
    std::uint64_t seed = 0;

    static SchedulerSpec heuristic(TaskRule task_rule, SiteRule site_rule = SiteRule::None);
    static SchedulerSpec offline(SiteRule site_rule = SiteRule::BestQuality);
    static SchedulerSpec roars(std::shared_ptr<const PolicyNet> policy, SearchConfig search,
                               PickMode mode = PickMode::Greedy);
    static SchedulerSpec random_search(SearchConfig search);

    /// Report label: "STF", "SQTF", "Offline", "ROARS", "Rewrite-random".
    std::string name() const;
};

struct OnlineResult {
    ScheduleDag dag;
    std::vector<int> dropped;
    double wall_seconds = 0.0;
    int replans = 0;

    /// Mean slowdown over scheduled tasks; dropped tasks are excluded.
    double avg_slowdown() const { return dag.mean_slowdown(); }
};

/// Steps the clock over the instance. Heuristic and offline specs delegate
/// to their schedulers. ROARS and random-search specs learn all exposures of
/// a target when it arrives, insert them first-come-first-served, then
/// re-plan with a rewrite search over not-yet-started tasks at every arrival
/// or completion step. Tasks starting now are committed; when more than
/// `queue_capacity` tasks are waiting, the earliest arrivals are committed.
OnlineResult run_online(const std::shared_ptr<const Instance> &inst, const SchedulerSpec &spec,
                        int queue_capacity = kDefaultQueueCapacity);

} // namespace roars
