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
#include <vector>

#include "roars/scenario.hpp"

namespace roars {

/// Per-(target, site) observability on the grid. `run_end[t]` is the first
/// step >= t that is not visible, so [t, t+e) is observable iff
/// run_end[t] >= t + e. `airmass[t]` is +inf where not visible.
struct VisibilityTable {
    int num_targets = 0;
    int num_sites = 0;
    int horizon = 0;
    std::vector<int> run_end;      // (target * num_sites + site) * (horizon + 1) + t
    std::vector<float> airmass;    // (target * num_sites + site) * horizon + t

    int run_end_at(int target, int site, int t) const {
        return run_end[(static_cast<std::size_t>(target) * num_sites + site) * (horizon + 1) + t];
    }
    float airmass_at(int target, int site, int t) const {
        return airmass[(static_cast<std::size_t>(target) * num_sites + site) * horizon + t];
    }
    bool observable(int target, int site, int start, int length) const {
        return start >= 0 && start + length <= horizon && run_end_at(target, site, start) >= start + length;
    }
    bool operator==(const VisibilityTable &) const = default;
};

/// Flattened task data used by the schedulers.
struct TaskInfo {
    int arrival = 0;
    int exposure = 1;
    int deadline = 0;
    int target = 0;
    std::uint32_t filter_mask = 0;
    int filter_count = 0;
    int prev_sibling = -1; // same target, seq_index - 1
    int next_sibling = -1;
    int gap = 0;           // minimum separation to the next sibling
};

/// Immutable compiled form of a Scenario shared by every ScheduleDag built
/// over it.
struct Instance {
    Scenario scenario;
    int num_sites = 1;
    int num_filters = 3;
    int horizon = 0;
    int max_exposure = 1;
    std::vector<TaskInfo> tasks;
    VisibilityTable visibility;

    int num_tasks() const { return static_cast<int>(tasks.size()); }

    /// Compiles a scenario; visibility tables use the OpenMP kernel when
    /// `parallel` is set, the serial reference otherwise.
    static std::shared_ptr<const Instance> build(Scenario scenario, bool parallel = true);
};

} // namespace roars
