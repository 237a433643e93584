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

// Hand-built instances for unit tests. Every site sits at latitude -30 and
// every target at the south celestial pole, with the darkness test turned
// off, so all targets are visible for the whole horizon.

#include <memory>
#include <vector>

#include "roars/schedule.hpp"

namespace roars::testing {

struct TargetSpec {
    int start = 0;
    int fade = 60;
    int exposure = 5;
    int gap = -1;            // < 0: back-to-back exposures
    unsigned filters = 0b1;  // bit f: filter f required
    int arrival = -1;        // < 0: same as start
};

inline Scenario make_scenario(const std::vector<TargetSpec> &specs, int num_sites = 1, int num_filters = 1,
                              int horizon = 60) {
    Scenario sc;
    sc.grid.horizon_steps = horizon;
    sc.constraints.max_sun_altitude_deg = 90.0;
    sc.num_filters = num_filters;
    for (int s = 0; s < num_sites; ++s)
        sc.sites.push_back(Site{"site" + std::to_string(s), ephemeris::GeoCoord::make(-30.0, -70.0 + 20.0 * s, 0.0),
                                0.5 + 0.1 * s});
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto &p = specs[i];
        Target t;
        t.id = static_cast<int>(i);
        t.coord = ephemeris::SkyCoord::make(0.0, -89.0);
        t.filters_required.assign(static_cast<std::size_t>(num_filters), false);
        for (int f = 0; f < num_filters; ++f) t.filters_required[static_cast<std::size_t>(f)] = (p.filters >> f) & 1u;
        t.start_time = p.start;
        t.fade_time = p.fade;
        t.exposure_minutes = p.exposure;
        t.mode = p.gap < 0 ? ObservationMode::exposure_count() : ObservationMode::cadence(p.gap);
        t.arrival_step = p.arrival < 0 ? p.start : p.arrival;
        sc.targets.push_back(t);
    }
    for (const auto &t : sc.targets) {
        auto tasks = target_to_tasks(t, static_cast<int>(sc.tasks.size()));
        sc.tasks.insert(sc.tasks.end(), tasks.begin(), tasks.end());
    }
    return sc;
}

/// A target with exactly one exposure and `slack` steps of lateness allowed.
inline TargetSpec single(int start, int exposure, unsigned filters = 0b1, int slack = 40) {
    return TargetSpec{start, start + exposure + slack, exposure, 1000, filters, -1};
}

inline std::shared_ptr<const Instance> make_instance(const std::vector<TargetSpec> &specs, int num_sites = 1,
                                                     int num_filters = 1, int horizon = 60) {
    return Instance::build(make_scenario(specs, num_sites, num_filters, horizon), false);
}

} // namespace roars::testing
