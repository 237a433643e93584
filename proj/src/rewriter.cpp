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

#include "roars/rewriter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace roars {

double SearchConfig::pc_at(long step) const {
    const double pc = pc_initial * std::pow(pc_decay, static_cast<double>(step / pc_decay_every));
    return std::max(pc_min, pc);
}

void SearchConfig::validate() const {
    if (num_steps < 0) throw std::invalid_argument("num_steps must be >= 0");
    if (region_candidates < 1 || rule_candidates < 1) throw std::invalid_argument("candidate budgets must be >= 1");
    if (!(pc_min >= 0.01 && pc_initial <= 1.0 && pc_min <= pc_initial))
        throw std::invalid_argument("p_c schedule must stay within [0.01, 1]");
    if (pc_decay_every < 1) throw std::invalid_argument("pc_decay_every must be >= 1");
}

std::vector<int> candidate_regions(const ScheduleDag &dag) {
    std::vector<int> out;
    for (int t : dag.tasks())
        if (dag.movable(t)) out.push_back(t);
    return out;
}

std::vector<Rule> candidate_rules(const ScheduleDag &dag, int region) {
    std::vector<Rule> out;
    out.reserve(static_cast<std::size_t>(dag.num_sites() + dag.size()));
    for (int s = 0; s < dag.num_sites(); ++s) out.push_back(Rule::root(s));
    for (int t : dag.tasks())
        if (t != region) out.push_back(Rule::after(t));
    return out;
}

std::vector<Rule> effective_rules(const ScheduleDag &dag, int region) {
    const auto &info = dag.instance().tasks[static_cast<std::size_t>(region)];
    const int site = dag.site_of(region);
    const int start = dag.start_of(region);
    std::vector<Rule> out;
    for (int s = 0; s < dag.num_sites(); ++s)
        if (s != site || std::max(info.arrival, dag.floor()) != start) out.push_back(Rule::root(s));
    for (int t : dag.tasks()) {
        if (t == region) continue;
        const int c = dag.completion_of(t);
        if (c < info.arrival || c < dag.floor() || c + info.exposure > info.deadline) continue;
        if (dag.site_of(t) == site && c == start) continue;
        out.push_back(Rule::after(t));
    }
    return out.empty() ? candidate_rules(dag, region) : out;
}

RewriteResult rewrite_step(const ScheduleDag &dag, const RewriteAction &action) {
    const int j = action.region;
    const auto &inst = dag.instance();
    auto unchanged = [&] { return RewriteResult{dag, false, false}; };
    auto rejected = [&] { return RewriteResult{dag, false, true}; };
    if (j < 0 || j >= inst.num_tasks() || !dag.movable(j)) return rejected();
    const auto &info = inst.tasks[static_cast<std::size_t>(j)];

    int site = 0;
    int parent_completion = 0;
    int start = 0;
    if (action.rule.is_root()) {
        site = root_site(action.rule.node);
        if (site < 0 || site >= dag.num_sites()) return rejected();
        parent_completion = info.arrival;
        start = std::max(info.arrival, dag.floor());
    } else {
        const int p = action.rule.node;
        if (p == j || p >= inst.num_tasks() || !dag.scheduled(p)) return rejected();
        parent_completion = dag.completion_of(p);
        site = dag.site_of(p);
        start = parent_completion;
    }
    if (parent_completion < info.arrival) return unchanged();
    if (site == dag.site_of(j) && start == dag.start_of(j)) return unchanged();
    if (start < dag.floor()) return unchanged();

    ScheduleDag next = dag;
    next.remove(j);

    // Displaced set: movable tasks on the destination site overlapping the new slot.
    const int end = start + info.exposure;
    std::vector<int> displaced;
    for (int t : next.tasks())
        if (next.site_of(t) == site && next.movable(t) && next.start_of(t) < end && next.completion_of(t) > start)
            displaced.push_back(t);
    std::sort(displaced.begin(), displaced.end(), [&](int a, int b) {
        return next.start_of(a) != next.start_of(b) ? next.start_of(a) < next.start_of(b) : a < b;
    });
    for (int t : displaced) next.remove(t);

    if (!next.fits(j, site, start, false)) return rejected();
    next.place(j, site, start);

    std::vector<int> moved{j};
    for (int t : displaced) {
        const auto s = next.earliest_start(t, site, 0, false);
        if (!s) return rejected();
        next.place(t, site, *s);
        moved.push_back(t);
    }

    // Cadence cascade: push later exposures that now start too early.
    for (std::size_t i = 0; i < moved.size(); ++i) {
        const int p = moved[i];
        const int q = next.scheduled_next_sibling(p);
        if (q < 0) continue;
        const int gap = inst.tasks[static_cast<std::size_t>(p)].gap;
        if (next.start_of(q) >= next.completion_of(p) + gap) continue;
        if (!next.movable(q)) return rejected();
        const int q_site = next.site_of(q);
        next.remove(q);
        const auto s = next.earliest_start(q, q_site, 0, false);
        if (!s) return rejected();
        next.place(q, q_site, *s);
        moved.push_back(q);
    }

    next.rebuild_edges();
    return RewriteResult{std::move(next), true, false};
}

RewriteAction RandomPicker::pick(const ScheduleDag &dag, Rng &rng) {
    const auto regions = candidate_regions(dag);
    if (regions.empty()) throw std::logic_error("RandomPicker: no movable task");
    const int region = regions[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(regions.size()) - 1))];
    const auto rules = effective_rules(dag, region);
    const auto rule = rules[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(rules.size()) - 1))];
    return RewriteAction{region, rule};
}

SearchResult rewrite_search(const ScheduleDag &dag0, ActionPicker &picker, const SearchConfig &config, Rng &rng) {
    SearchResult result{dag0, {}};
    ScheduleDag current = dag0;
    double current_cost = current.total_slowdown();
    double best_cost = current_cost;
    result.trajectory.reserve(static_cast<std::size_t>(config.num_steps));
    for (int step = 0; step < config.num_steps; ++step) {
        if (candidate_regions(current).empty()) break;
        const auto action = picker.pick(current, rng);
        auto outcome = rewrite_step(current, action);
        const double after = outcome.changed ? outcome.dag.total_slowdown() : current_cost;
        result.trajectory.push_back({step, action.region, action.rule, current_cost, after, outcome.rejected});
        if (outcome.changed) {
            current = std::move(outcome.dag);
            current_cost = after;
            if (current_cost < best_cost) {
                best_cost = current_cost;
                result.best = current;
            }
        }
    }
    return result;
}

ScheduleDag random_restart_search(const ScheduleDag &dag0, const SearchConfig &config, int restarts, std::uint64_t seed) {
    ScheduleDag best = dag0;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        RandomPicker picker;
        auto res = rewrite_search(dag0, picker, config, rng);
        if (res.best.total_slowdown() < best.total_slowdown()) best = std::move(res.best);
    }
    return best;
}

std::string trajectory_dump(const std::vector<StepRecord> &trajectory) {
    std::string out;
    for (const auto &r : trajectory) {
        nlohmann::json rule = r.rule.is_root() ? nlohmann::json("root:" + std::to_string(root_site(r.rule.node)))
                                               : nlohmann::json(r.rule.node);
        nlohmann::json j{{"step", r.step},         {"region", r.region},           {"rule", rule},
                         {"cost_before", r.cost_before}, {"cost_after", r.cost_after}, {"rejected", r.rejected}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

} // namespace roars
