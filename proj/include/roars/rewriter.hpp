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

#include <string>
#include <vector>

#include "roars/rng.hpp"
#include "roars/schedule.hpp"

namespace roars {

/// A rewriting rule: the new parent of the region task, either a site root
/// (start at the required time) or another task (start when it completes).
struct Rule {
    int node = root_node(0); // see root_node()/is_root()

    static Rule root(int site) { return Rule{root_node(site)}; }
    static Rule after(int task) { return Rule{task}; }
    bool is_root() const { return roars::is_root(node); }
    bool operator==(const Rule &) const = default;
};

struct RewriteAction {
    int region = 0; // task id
    Rule rule;
};

struct RewriteResult {
    ScheduleDag dag;
    bool changed = false;
    bool rejected = false; // repair failed; dag is the input unchanged
};

struct SearchConfig {
    int num_steps = 100;
    int region_candidates = 15;
    int rule_candidates = 15;
    double pc_initial = 0.5;
    double pc_decay = 0.8;
    int pc_decay_every = 1000;
    double pc_min = 0.01;

    static SearchConfig intra_site() { return {}; }
    static SearchConfig distributed() {
        SearchConfig c;
        c.region_candidates = 30;
        c.rule_candidates = 30;
        return c;
    }
    /// Probability of taking the best-scored region at optimizer step `step`.
    double pc_at(long step) const;
    void validate() const;
};

/// Movable task nodes, ascending id. Roots are never regions.
std::vector<int> candidate_regions(const ScheduleDag &dag);

/// Every site root followed by every other scheduled task, ascending.
std::vector<Rule> candidate_rules(const ScheduleDag &dag, int region);

/// Subset of candidate_rules(dag, region) that rewrite_step would not
/// dismiss up front: the parent completes at or after the region's required
/// time and the floor, the new slot can still meet the deadline, and it
/// differs from the current one.
/// Falls back to candidate_rules() when every rule is a no-op.
std::vector<Rule> effective_rules(const ScheduleDag &dag, int region);

/// One local rewrite: re-parent `region` under `rule`, displace the tasks
/// overlapping its new slot on the destination site and re-place them (in
/// start order) at their earliest feasible step, cascading cadence
/// successors. No-op when the parent completes before the region's required
/// time or already is its start; rejected (no-op, flagged) when the repair
/// cannot keep every constraint.
RewriteResult rewrite_step(const ScheduleDag &dag, const RewriteAction &action);

struct StepRecord {
    int step = 0;
    int region = 0;
    Rule rule;
    double cost_before = 0.0;
    double cost_after = 0.0;
    bool rejected = false;
};

/// Chooses the next action. Implementations may keep per-search state.
class ActionPicker {
  public:
    virtual ~ActionPicker() = default;
    virtual RewriteAction pick(const ScheduleDag &dag, Rng &rng) = 0;
};

/// Uniform region, then uniform rule.
class RandomPicker final : public ActionPicker {
  public:
    RewriteAction pick(const ScheduleDag &dag, Rng &rng) override;
};

struct SearchResult {
    ScheduleDag best;
    std::vector<StepRecord> trajectory;
};

/// Runs config.num_steps rewrites from dag0, committing every accepted
/// rewrite, and returns the cheapest state visited (by total slowdown).
SearchResult rewrite_search(const ScheduleDag &dag0, ActionPicker &picker, const SearchConfig &config, Rng &rng);

/// Best of `restarts` independent random searches.
ScheduleDag random_restart_search(const ScheduleDag &dag0, const SearchConfig &config, int restarts, std::uint64_t seed);

/// JSON lines {step, region, rule, cost_before, cost_after, rejected};
/// rule is "root:<site>" or the parent task id.
std::string trajectory_dump(const std::vector<StepRecord> &trajectory);

} // namespace roars
