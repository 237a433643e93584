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

#include "roars/online.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace roars {

SchedulerSpec SchedulerSpec::heuristic(TaskRule task_rule, SiteRule site_rule) {
    SchedulerSpec s;
    s.kind = SchedulerKind::Heuristic;
    s.task_rule = task_rule;
    s.site_rule = site_rule;
    return s;
}

SchedulerSpec SchedulerSpec::offline(SiteRule site_rule) {
    SchedulerSpec s;
    s.kind = SchedulerKind::Offline;
    s.task_rule = TaskRule::STF;
    s.site_rule = site_rule;
    return s;
}

SchedulerSpec SchedulerSpec::roars(std::shared_ptr<const PolicyNet> policy, SearchConfig search, PickMode mode) {
    SchedulerSpec s;
    s.kind = SchedulerKind::Roars;
    s.policy = std::move(policy);
    s.search = search;
    s.mode = mode;
    return s;
}

SchedulerSpec SchedulerSpec::random_search(SearchConfig search) {
    SchedulerSpec s;
    s.kind = SchedulerKind::RandomSearch;
    s.search = search;
    return s;
}

std::string SchedulerSpec::name() const {
    switch (kind) {
    case SchedulerKind::Heuristic: return heuristic_name(task_rule, site_rule);
    case SchedulerKind::Offline: return "Offline";
    case SchedulerKind::Roars: return "ROARS";
    case SchedulerKind::RandomSearch: return "Rewrite-random";
    }
    return "?";
}

namespace {

OnlineResult run_rewriting(const std::shared_ptr<const Instance> &inst, const SchedulerSpec &spec, int queue_capacity) {
    OnlineResult out{ScheduleDag(inst), {}, 0.0, 0};
    auto &dag = out.dag;
    const int n = inst->num_tasks();

    std::unique_ptr<ActionPicker> picker;
    if (spec.kind == SchedulerKind::Roars) {
        if (!spec.policy) throw std::invalid_argument("ROARS scheduler needs a policy");
        spec.policy->check_compatible(*inst);
        picker = std::make_unique<PolicyPicker>(*spec.policy, spec.search, spec.mode);
    } else {
        picker = std::make_unique<RandomPicker>();
    }
    Rng rng(derive_seed(spec.seed, inst->scenario.rng_seed));

    // A target's exposures are all known once the target arrives.
    const auto &sc = inst->scenario;
    auto announced = [&](int j) { return sc.target_of(sc.tasks[static_cast<std::size_t>(j)]).arrival_step; };
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto &x = inst->tasks[static_cast<std::size_t>(a)];
        const auto &y = inst->tasks[static_cast<std::size_t>(b)];
        if (announced(a) != announced(b)) return announced(a) < announced(b);
        return x.arrival < y.arrival;
    });
    std::vector<std::uint8_t> dropped(static_cast<std::size_t>(n), 0);
    std::size_t cursor = 0;

    for (int t = 0; t < inst->horizon; ++t) {
        dag.set_floor(t);
        bool event = false;
        while (cursor < order.size() && announced(order[cursor]) <= t) {
            const int j = order[cursor++];
            event = true;
            const int prev = inst->tasks[static_cast<std::size_t>(j)].prev_sibling;
            std::optional<std::pair<int, int>> slot; // (start, site)
            if (prev < 0 || !dropped[static_cast<std::size_t>(prev)])
                for (int s = 0; s < inst->num_sites; ++s)
                    if (const auto b = dag.earliest_start(j, s, t); b && (!slot || *b < slot->first))
                        slot = std::make_pair(*b, s);
            if (slot) {
                dag.place(j, slot->second, slot->first);
            } else {
                dropped[static_cast<std::size_t>(j)] = 1;
                out.dropped.push_back(j);
            }
        }
        if (!event)
            for (int k : dag.tasks())
                if (dag.completion_of(k) == t) {
                    event = true;
                    break;
                }
        if (event && !candidate_regions(dag).empty()) {
            auto res = rewrite_search(dag, *picker, spec.search, rng);
            dag = std::move(res.best);
            ++out.replans;
        }

        // Commit what starts now, then enforce the waiting-queue bound.
        std::vector<int> waiting;
        for (int k : dag.tasks()) {
            if (dag.pinned(k)) continue;
            if (dag.start_of(k) == t)
                dag.pin(k);
            else if (dag.start_of(k) > t && inst->tasks[static_cast<std::size_t>(k)].arrival <= t)
                waiting.push_back(k);
        }
        if (static_cast<int>(waiting.size()) > queue_capacity) {
            std::sort(waiting.begin(), waiting.end(), [&](int a, int b) {
                const int aa = inst->tasks[static_cast<std::size_t>(a)].arrival;
                const int ab = inst->tasks[static_cast<std::size_t>(b)].arrival;
                return aa != ab ? aa < ab : a < b;
            });
            for (std::size_t k = 0; k < waiting.size() - static_cast<std::size_t>(queue_capacity); ++k)
                dag.pin(waiting[k]);
        }
    }
    for (; cursor < order.size(); ++cursor) out.dropped.push_back(order[cursor]);
    dag.set_floor(0);
    dag.rebuild_edges();
    std::sort(out.dropped.begin(), out.dropped.end());
    return out;
}

} // namespace

OnlineResult run_online(const std::shared_ptr<const Instance> &inst, const SchedulerSpec &spec, int queue_capacity) {
    if (queue_capacity < 1) throw std::invalid_argument("queue capacity must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    OnlineResult out;
    switch (spec.kind) {
    case SchedulerKind::Heuristic: {
        auto r = schedule_online_heuristic(inst, spec.task_rule, spec.site_rule, queue_capacity);
        out = OnlineResult{std::move(r.dag), std::move(r.dropped), 0.0, 0};
        break;
    }
    case SchedulerKind::Offline: {
        auto r = schedule_offline_stf(inst, spec.site_rule);
        out = OnlineResult{std::move(r.dag), std::move(r.dropped), 0.0, 0};
        break;
    }
    case SchedulerKind::Roars:
    case SchedulerKind::RandomSearch: out = run_rewriting(inst, spec, queue_capacity); break;
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace roars
