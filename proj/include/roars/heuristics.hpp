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

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "roars/schedule.hpp"

namespace roars {

enum class TaskRule { FCFS, STF, EDD, SPT, RIP };
enum class SiteRule { None, BestQuality, BestPriority };

std::string to_string(TaskRule rule);
std::string to_string(SiteRule rule);
TaskRule parse_task_rule(const std::string &name);

/// Distributed baseline acronym, e.g. (STF, BestQuality) -> "SQTF".
std::string heuristic_name(TaskRule task_rule, SiteRule site_rule);

/// Ordering key; smaller ranks first. Ties fall back to (arrival, task id).
struct RankKey {
    double primary = 0.0;
    int arrival = 0;
    int task_id = 0;
    auto operator<=>(const RankKey &) const = default;
};

/// FCFS: A_j. STF: exposure. EDD: deadline. SPT: target duration.
/// RIP: -(required filters x number of exposures of the target).
RankKey rank_key(TaskRule rule, const ObservationTask &task, const Target &target);

struct HeuristicResult {
    ScheduleDag dag;
    std::vector<int> dropped; // ascending task ids
};

inline constexpr int kDefaultQueueCapacity = 10;

/// Online list scheduling: tasks join the waiting queue at their required
/// time; every step the queue is scanned in rule order and each task that can
/// start now does so on a site picked by `site_rule`. A task waits until its
/// previous exposure is placed or dropped. When more than W tasks are
/// queued, the rule-minimal ones are committed to their earliest feasible
/// (site, start). Tasks that can no longer finish by their deadline are
/// dropped.
HeuristicResult schedule_online_heuristic(const std::shared_ptr<const Instance> &inst, TaskRule task_rule,
                                          SiteRule site_rule = SiteRule::None, int queue_capacity = kDefaultQueueCapacity);

/// Offline shortest-exposure-first: all tasks known up front, placed in
/// ascending exposure order at their earliest feasible slot (B >= A).
HeuristicResult schedule_offline_stf(const std::shared_ptr<const Instance> &inst,
                                     SiteRule site_rule = SiteRule::BestQuality);

class NoFeasibleSchedule : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kOracleMaxTasks = 6;
inline constexpr int kOracleMaxHorizon = 60;

/// Exhaustive minimum-total-slowdown schedule of every task. Starts are
/// restricted to the left-shifted candidates: arrival, another task's
/// completion, a visibility-window opening, or a cadence bound.
ScheduleDag brute_force_optimal(const std::shared_ptr<const Instance> &inst);

/// Picks among sites where `task` could start at `start`.
std::optional<int> choose_site(const ScheduleDag &dag, int task, int start, SiteRule rule);

} // namespace roars
