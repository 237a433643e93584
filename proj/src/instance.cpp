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

#include "roars/instance.hpp"

#include <algorithm>
#include <map>

#include "roars/parallel.hpp"

namespace roars {

std::shared_ptr<const Instance> Instance::build(Scenario scenario, bool parallel) {
    if (scenario.sites.empty()) throw std::invalid_argument("scenario has no sites");
    if (scenario.num_filters < 1 || scenario.num_filters > 32) throw std::invalid_argument("num_filters must be in [1, 32]");
    auto inst = std::make_shared<Instance>();
    inst->num_sites = static_cast<int>(scenario.sites.size());
    inst->num_filters = scenario.num_filters;
    inst->horizon = scenario.grid.horizon_steps;
    inst->visibility = parallel ? parallel::visibility_table_omp(scenario) : parallel::visibility_table_serial(scenario);

    std::map<std::pair<int, int>, int> by_seq; // (target, seq) -> task
    inst->tasks.reserve(scenario.tasks.size());
    for (const auto &k : scenario.tasks) {
        if (k.id != static_cast<int>(inst->tasks.size())) throw std::invalid_argument("task ids must be 0..n-1 in order");
        const auto &tg = scenario.target_of(k);
        TaskInfo info;
        info.arrival = k.arrival;
        info.exposure = k.exposure;
        info.deadline = std::min(k.deadline, inst->horizon);
        info.target = k.target_id;
        for (int f = 0; f < scenario.num_filters; ++f)
            if (k.rho[static_cast<std::size_t>(f)]) {
                info.filter_mask |= 1u << f;
                ++info.filter_count;
            }
        info.gap = tg.mode.kind == ObservationMode::Kind::Cadence ? tg.mode.gap_minutes : 0;
        inst->max_exposure = std::max(inst->max_exposure, k.exposure);
        by_seq[{k.target_id, k.seq_index}] = k.id;
        inst->tasks.push_back(info);
    }
    for (const auto &[key, id] : by_seq) {
        auto next = by_seq.find({key.first, key.second + 1});
        if (next != by_seq.end()) {
            inst->tasks[static_cast<std::size_t>(id)].next_sibling = next->second;
            inst->tasks[static_cast<std::size_t>(next->second)].prev_sibling = id;
        }
    }
    inst->scenario = std::move(scenario);
    return inst;
}

} // namespace roars
