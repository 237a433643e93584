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

#include "roars/online.hpp"

namespace roars {

/// Reads num_steps, region_candidates, rule_candidates, pc_initial,
/// pc_decay, pc_decay_every and pc_min on top of `base`.
SearchConfig search_config_from_json(const std::string &text, SearchConfig base = {});

/// Scheduler names accepted by benchmarks: the five task rules ("STF", ...),
/// their site-rule pairs ("SQTF", "SPTF", ...), "Offline", "ROARS" and
/// "Rewrite-random". `policy` is required for "ROARS" only.
SchedulerSpec parse_scheduler(const std::string &name, std::shared_ptr<const PolicyNet> policy,
                              const SearchConfig &search, PickMode mode);

/// The ten task-rule/site-rule pairs, in report order.
std::vector<std::string> heuristic_pair_names();

struct Ablation {
    std::string label;
    std::string scenario_json; // full generator config, overrides applied
};

struct BenchConfig {
    std::vector<Ablation> ablations;
    std::vector<std::string> schedulers;
    int instances = 100;
    std::uint64_t seed = 0;
    int queue_capacity = kDefaultQueueCapacity;
    SearchConfig search;
    std::string checkpoint; // needed when "ROARS" is listed
    PickMode mode = PickMode::Sample;
};

/// Keys: "scenario" (generator config), optional "ablations"
/// [{"label", "overrides"}] merged into it, "schedulers", "instances",
/// "seed", "queue_capacity", "search", "checkpoint" (relative paths resolve
/// against `base_dir`) and "mode".
BenchConfig bench_config_from_json(const std::string &text, const std::string &base_dir = ".");

struct BenchRow {
    std::string ablation;
    std::string scheduler;
    int instance = 0;
    std::uint64_t seed = 0; // scenario seed
    int tasks = 0;
    double avg_slowdown = 0.0;
    int drop_count = 0;
    double wall_seconds = 0.0;
    std::string error; // non-empty when this run failed
};

struct SummaryRow {
    std::string ablation;
    std::string scheduler;
    int instances = 0; // successful runs
    double mean_slowdown = 0.0;
    long drop_count = 0;
    double wall_seconds = 0.0; // total
    int failures = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;       // ablation, instance, scheduler order
    std::vector<SummaryRow> summary;  // ablation, scheduler order
};

/// Seed of instance `index` of a benchmark seeded with `seed`.
std::uint64_t bench_instance_seed(std::uint64_t seed, int index);

/// Runs every scheduler on every instance of every ablation. Instances run
/// in parallel; a failing run is recorded on its row and the rest continue.
/// Set `parallel` false to use the serial reference loop.
BenchReport run_benchmark(const BenchConfig &config, bool parallel = true);

/// Per-run rows without wall times, so equal configs give equal bytes.
std::string rows_csv(const BenchReport &report);
std::string summary_csv(const BenchReport &report);
/// Per-run and total wall times.
std::string timing_csv(const BenchReport &report);
/// Grouped bars of mean slowdown: one group per ablation, one bar per
/// scheduler, with the plotted values embedded as a table.
std::string summary_svg(const BenchReport &report);

/// RFC 4180 field quoting.
std::string csv_field(const std::string &s);

} // namespace roars
