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

#include "roars/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roars::parallel {

namespace eph = ephemeris;

int worker_count() {
    if (const char *env = std::getenv("ROARS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

struct SiteSky {
    std::vector<double> lst;
    std::vector<unsigned char> dark;
};

SiteSky site_sky(const Scenario &s, int site) {
    const int h = s.grid.horizon_steps;
    SiteSky out{std::vector<double>(static_cast<std::size_t>(h)), std::vector<unsigned char>(static_cast<std::size_t>(h))};
    const auto &geo = s.sites[static_cast<std::size_t>(site)].coord;
    for (int t = 0; t < h; ++t) {
        const double jd = s.grid.julian_date(t);
        out.lst[static_cast<std::size_t>(t)] = eph::local_sidereal_time(jd, geo);
        out.dark[static_cast<std::size_t>(t)] = eph::sun_altitude(jd, geo) <= s.constraints.max_sun_altitude_deg;
    }
    return out;
}

VisibilityTable empty_table(const Scenario &s) {
    VisibilityTable v;
    v.num_targets = static_cast<int>(s.targets.size());
    v.num_sites = static_cast<int>(s.sites.size());
    v.horizon = s.grid.horizon_steps;
    const auto pairs = static_cast<std::size_t>(v.num_targets) * v.num_sites;
    v.run_end.assign(pairs * (v.horizon + 1), 0);
    v.airmass.assign(pairs * v.horizon, std::numeric_limits<float>::infinity());
    return v;
}

void fill_pair(const Scenario &s, const SiteSky &sky, int target, int site, VisibilityTable &v) {
    const auto pair = static_cast<std::size_t>(target) * v.num_sites + site;
    const auto &tg = s.targets[static_cast<std::size_t>(target)];
    const auto &geo = s.sites[static_cast<std::size_t>(site)].coord;
    float *am = v.airmass.data() + pair * v.horizon;
    int *run = v.run_end.data() + pair * (v.horizon + 1);
    for (int t = 0; t < v.horizon; ++t) {
        if (!sky.dark[static_cast<std::size_t>(t)]) continue;
        const auto x = eph::airmass(eph::altitude(tg.coord, geo, sky.lst[static_cast<std::size_t>(t)]),
                                    s.constraints.min_altitude_deg);
        if (x && *x <= s.constraints.max_airmass) am[t] = static_cast<float>(*x);
    }
    run[v.horizon] = v.horizon;
    for (int t = v.horizon - 1; t >= 0; --t)
        run[t] = std::isinf(am[t]) ? t : run[t + 1];
}

} // namespace

VisibilityTable visibility_table_serial(const Scenario &s) {
    auto v = empty_table(s);
    for (int site = 0; site < v.num_sites; ++site) {
        const auto sky = site_sky(s, site);
        for (int target = 0; target < v.num_targets; ++target) fill_pair(s, sky, target, site, v);
    }
    return v;
}

VisibilityTable visibility_table_omp(const Scenario &s) {
    auto v = empty_table(s);
    std::vector<SiteSky> skies(static_cast<std::size_t>(v.num_sites));
    const int n_pairs = v.num_targets * v.num_sites;
#pragma omp parallel num_threads(worker_count())
    {
#pragma omp for schedule(static)
        for (int site = 0; site < v.num_sites; ++site) skies[static_cast<std::size_t>(site)] = site_sky(s, site);
#pragma omp for schedule(dynamic, 4)
        for (int p = 0; p < n_pairs; ++p) {
            const int site = p % v.num_sites;
            fill_pair(s, skies[static_cast<std::size_t>(site)], p / v.num_sites, site, v);
        }
    }
    return v;
}

void for_each_index_serial(int n, const std::function<void(int)> &body) {
    for (int i = 0; i < n; ++i) body(i);
}

void for_each_index_omp(int n, const std::function<void(int)> &body) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (int i = 0; i < n; ++i) body(i);
}

} // namespace roars::parallel
