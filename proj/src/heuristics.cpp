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

#include "roars/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace roars {

std::string to_string(TaskRule rule) {
    switch (rule) {
    case TaskRule::FCFS: return "FCFS";
    case TaskRule::STF: return "STF";
    case TaskRule::EDD: return "EDD";
    case TaskRule::SPT: return "SPT";
    case TaskRule::RIP: return "RIP";
    }
    return "?";
}

std::string to_string(SiteRule rule) {
    switch (rule) {
    case SiteRule::None: return "none";
    case SiteRule::BestQuality: return "quality";
    case SiteRule::BestPriority: return "priority";
    }
    return "?";
}

TaskRule parse_task_rule(const std::string &name) {
    for (auto r : {TaskRule::FCFS, TaskRule::STF, TaskRule::EDD, TaskRule::SPT, TaskRule::RIP})
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown task rule: " + name);
}

std::string heuristic_name(TaskRule task_rule, SiteRule site_rule) {
    if (site_rule == SiteRule::None) return to_string(task_rule);
    // Task letter, site letter, "TF": (STF, BestQuality) -> SQTF.
    char task = 'S';
    switch (task_rule) {
    case TaskRule::FCFS: task = 'F'; break;
    case TaskRule::STF: task = 'S'; break;
    case TaskRule::EDD: task = 'D'; break;
    case TaskRule::SPT: task = 'P'; break;
    case TaskRule::RIP: task = 'R'; break;
    }
    return std::string{task, site_rule == SiteRule::BestQuality ? 'Q' : 'P'} + "TF";
}

RankKey rank_key(TaskRule rule, const ObservationTask &task, const Target &target) {
    if (task.target_id != target.id) throw std::invalid_argument("rank_key: task does not belong to target");
    double primary = 0.0;
    switch (rule) {
    case TaskRule::FCFS: primary = task.arrival; break;
    case TaskRule::STF: primary = task.exposure; break;
    case TaskRule::EDD: primary = task.deadline; break;
    case TaskRule::SPT: primary = target.duration(); break;
    case TaskRule::RIP: {
        const auto exposures = target_to_tasks(target, 0).size();
        primary = -static_cast<double>(target.filter_count()) * static_cast<double>(exposures);
        break;
    }
    }
    return RankKey{primary, task.arrival, task.id};
}

namespace {

std::vector<RankKey> rank_all(const Instance &inst, TaskRule rule) {
    const auto &sc = inst.scenario;
    std::vector<RankKey> keys;
    keys.reserve(sc.tasks.size());
    if (rule != TaskRule::RIP) {
        for (const auto &k : sc.tasks) keys.push_back(rank_key(rule, k, sc.target_of(k)));
        return keys;
    }
    // Exposure counts once per target instead of re-expanding per task.
    std::vector<int> per_target(sc.targets.size(), 0);
    for (const auto &k : sc.tasks) ++per_target[static_cast<std::size_t>(k.target_id)];
    for (const auto &k : sc.tasks) {
        const auto &tg = sc.target_of(k);
        keys.push_back({-static_cast<double>(tg.filter_count()) * per_target[static_cast<std::size_t>(k.target_id)],
                        k.arrival, k.id});
    }
    return keys;
}

bool better_site(const ScheduleDag &dag, int task, int start, SiteRule rule, int a, int b) {
    // true when site a beats site b
    const auto &inst = dag.instance();
    switch (rule) {
    case SiteRule::BestQuality: {
        const int tg = inst.tasks[static_cast<std::size_t>(task)].target;
        const float xa = inst.visibility.airmass_at(tg, a, start);
        const float xb = inst.visibility.airmass_at(tg, b, start);
        if (xa != xb) return xa < xb;
        break;
    }
    case SiteRule::BestPriority: {
        const double pa = inst.scenario.sites[static_cast<std::size_t>(a)].equipment_priority;
        const double pb = inst.scenario.sites[static_cast<std::size_t>(b)].equipment_priority;
        if (pa != pb) return pa > pb;
        break;
    }
    case SiteRule::None: break;
    }
    return a < b;
}

struct Slot {
    int site = -1;
    int start = -1;
};

// Earliest feasible start over all sites; ties broken by the site rule.
Slot earliest_slot(const ScheduleDag &dag, int task, int lower_bound, SiteRule rule) {
    Slot best;
    for (int s = 0; s < dag.num_sites(); ++s) {
        const auto b = dag.earliest_start(task, s, lower_bound);
        if (!b) continue;
        if (best.site < 0 || *b < best.start || (*b == best.start && better_site(dag, task, *b, rule, s, best.site)))
            best = {s, *b};
    }
    return best;
}

} // namespace

std::optional<int> choose_site(const ScheduleDag &dag, int task, int start, SiteRule rule) {
    std::optional<int> best;
    for (int s = 0; s < dag.num_sites(); ++s) {
        if (!dag.fits(task, s, start)) continue;
        if (!best || better_site(dag, task, start, rule, s, *best)) best = s;
    }
    return best;
}

HeuristicResult schedule_online_heuristic(const std::shared_ptr<const Instance> &inst, TaskRule task_rule,
                                          SiteRule site_rule, int queue_capacity) {
    if (queue_capacity < 1) throw std::invalid_argument("queue capacity must be >= 1");
    HeuristicResult out{ScheduleDag(inst), {}};
    auto &dag = out.dag;
    const int n = inst->num_tasks();
    const auto keys = rank_all(*inst, task_rule);

    std::vector<int> by_arrival(static_cast<std::size_t>(n));
    std::iota(by_arrival.begin(), by_arrival.end(), 0);
    std::stable_sort(by_arrival.begin(), by_arrival.end(), [&](int a, int b) {
        return inst->tasks[static_cast<std::size_t>(a)].arrival < inst->tasks[static_cast<std::size_t>(b)].arrival;
    });

    // 0 pending, 1 queued, 2 placed, 3 dropped
    std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);
    // Earliest step the task could possibly start; placements only ever
    // remove capacity, so this is monotone and recomputed once exceeded.
    std::vector<int> next_possible(static_cast<std::size_t>(n), -1);
    std::vector<int> queue;
    std::size_t cursor = 0;

    auto by_rank = [&](int a, int b) { return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)]; };
    auto eligible = [&](int j) {
        const int p = inst->tasks[static_cast<std::size_t>(j)].prev_sibling;
        return p < 0 || state[static_cast<std::size_t>(p)] >= 2;
    };
    auto drop = [&](int j) {
        state[static_cast<std::size_t>(j)] = 3;
        out.dropped.push_back(j);
    };

    for (int t = 0; t < inst->horizon; ++t) {
        while (cursor < by_arrival.size() && inst->tasks[static_cast<std::size_t>(by_arrival[cursor])].arrival <= t) {
            const int j = by_arrival[cursor++];
            state[static_cast<std::size_t>(j)] = 1;
            queue.push_back(j);
        }
        if (queue.empty()) continue;
        dag.set_floor(t);
        std::sort(queue.begin(), queue.end(), by_rank);

        // Repeatedly dispatch the rule-minimal task that can start now; a
        // placement can unblock a waiting sibling, hence the outer loop.
        bool progress = true;
        while (progress) {
            progress = false;
            for (int j : queue) {
                if (state[static_cast<std::size_t>(j)] != 1 || !eligible(j)) continue;
                auto &np = next_possible[static_cast<std::size_t>(j)];
                if (np < t) {
                    const auto slot = earliest_slot(dag, j, t, site_rule);
                    if (slot.site < 0) {
                        drop(j);
                        progress = true;
                        continue;
                    }
                    np = slot.start;
                }
                if (np != t) continue;
                const auto site = choose_site(dag, j, t, site_rule);
                if (!site) {
                    np = -1;
                    continue;
                }
                dag.place(j, *site, t);
                state[static_cast<std::size_t>(j)] = 2;
                progress = true;
            }
            std::erase_if(queue, [&](int j) { return state[static_cast<std::size_t>(j)] != 1; });
        }

        // Overflow: commit rule-minimal eligible tasks to their earliest slot.
        while (static_cast<int>(queue.size()) > queue_capacity) {
            auto it = std::find_if(queue.begin(), queue.end(), eligible);
            if (it == queue.end()) break;
            const int j = *it;
            const auto slot = earliest_slot(dag, j, t, site_rule);
            if (slot.site < 0) {
                drop(j);
            } else {
                dag.place(j, slot.site, slot.start);
                state[static_cast<std::size_t>(j)] = 2;
            }
            queue.erase(it);
        }
    }
    for (int j : queue) drop(j);
    for (std::size_t c = cursor; c < by_arrival.size(); ++c) drop(by_arrival[c]);

    dag.set_floor(0);
    dag.rebuild_edges();
    std::sort(out.dropped.begin(), out.dropped.end());
    return out;
}

HeuristicResult schedule_offline_stf(const std::shared_ptr<const Instance> &inst, SiteRule site_rule) {
    HeuristicResult out{ScheduleDag(inst), {}};
    const int n = inst->num_tasks();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto &x = inst->tasks[static_cast<std::size_t>(a)];
        const auto &y = inst->tasks[static_cast<std::size_t>(b)];
        if (x.exposure != y.exposure) return x.exposure < y.exposure;
        if (x.arrival != y.arrival) return x.arrival < y.arrival;
        return a < b;
    });
    std::vector<std::uint8_t> dropped(static_cast<std::size_t>(n), 0);
    for (int j : order) {
        const int p = inst->tasks[static_cast<std::size_t>(j)].prev_sibling;
        if (p >= 0 && dropped[static_cast<std::size_t>(p)]) {
            dropped[static_cast<std::size_t>(j)] = 1;
            continue;
        }
        const auto slot = earliest_slot(out.dag, j, inst->tasks[static_cast<std::size_t>(j)].arrival, site_rule);
        if (slot.site < 0) {
            dropped[static_cast<std::size_t>(j)] = 1;
            continue;
        }
        out.dag.place(j, slot.site, slot.start);
    }
    for (int j = 0; j < n; ++j)
        if (dropped[static_cast<std::size_t>(j)]) out.dropped.push_back(j);
    out.dag.rebuild_edges();
    return out;
}

namespace {

class Oracle {
  public:
    explicit Oracle(const std::shared_ptr<const Instance> &inst) : inst_(*inst), dag_(inst) {}

    ScheduleDag run() {
        search(0, 0.0);
        if (!found_) throw NoFeasibleSchedule("no feasible schedule");
        return best_;
    }

  private:
    void candidates(int task, int site, std::vector<int> &out) const {
        const auto &info = inst_.tasks[static_cast<std::size_t>(task)];
        out.clear();
        out.push_back(info.arrival);
        for (int p : dag_.tasks()) out.push_back(dag_.completion_of(p));
        const int prev = dag_.scheduled_prev_sibling(task);
        if (prev >= 0) out.push_back(dag_.completion_of(prev) + inst_.tasks[static_cast<std::size_t>(prev)].gap);
        const auto &vis = inst_.visibility;
        for (int t = 0; t < inst_.horizon; ++t) {
            const bool open = vis.run_end_at(info.target, site, t) > t;
            const bool before = t > 0 && vis.run_end_at(info.target, site, t - 1) > t - 1;
            if (open && !before) out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

    void search(int placed, double cost) {
        const int n = inst_.num_tasks();
        if (placed == n) {
            if (!found_ || cost < best_cost_) {
                found_ = true;
                best_cost_ = cost;
                best_ = dag_;
            }
            return;
        }
        // Every remaining task adds at least 1.
        if (found_ && cost + (n - placed) >= best_cost_) return;

        std::vector<int> starts;
        for (int j = 0; j < n; ++j) {
            if (dag_.scheduled(j)) continue;
            const int prev = inst_.tasks[static_cast<std::size_t>(j)].prev_sibling;
            if (prev >= 0 && !dag_.scheduled(prev)) continue;
            for (int s = 0; s < inst_.num_sites; ++s) {
                candidates(j, s, starts);
                for (int b : starts) {
                    // Enumerate in non-decreasing start order.
                    if (b < last_start_ || !dag_.fits(j, s, b)) continue;
                    const int saved = last_start_;
                    dag_.place(j, s, b);
                    last_start_ = b;
                    search(placed + 1, cost + dag_.slowdown(j));
                    last_start_ = saved;
                    dag_.remove(j);
                }
            }
        }
    }

    const Instance &inst_;
    ScheduleDag dag_;
    ScheduleDag best_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    bool found_ = false;
    int last_start_ = 0;
};

} // namespace

ScheduleDag brute_force_optimal(const std::shared_ptr<const Instance> &inst) {
    if (inst->num_tasks() > kOracleMaxTasks)
        throw std::invalid_argument("brute_force_optimal: at most " + std::to_string(kOracleMaxTasks) + " tasks");
    if (inst->horizon > kOracleMaxHorizon)
        throw std::invalid_argument("brute_force_optimal: horizon must be <= " + std::to_string(kOracleMaxHorizon));
    auto best = Oracle(inst).run();
    best.rebuild_edges();
    return best;
}

} // namespace roars
