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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "roars/online.hpp"

namespace roars {

struct TrainConfig {
    int hidden = 64;
    long steps = 2000;   // optimizer steps
    int batch = 128;     // trajectories per step
    int episode_steps = 20;
    double alpha = 10.0;
    double gamma = 0.9;
    double lr0 = 1e-4;
    double lr_decay = 0.9;
    int lr_decay_every = 1000;
    int pool_size = 2048;     // training instances, sampled with replacement
    int val_every = 100;
    int val_instances = 20;
    PickMode eval_mode = PickMode::Greedy;
    int queue_capacity = kDefaultQueueCapacity;
    std::uint64_t seed = 1;

    double lr_at(long step) const;
    void validate() const;
};

/// Reads the keys above (eval_mode as "greedy"/"sample"); missing keys keep
/// their defaults.
TrainConfig train_config_from_json(const std::string &text);

/// Network shape for scenarios drawn from `gen`.
PolicyDims dims_for(const GenConfig &gen, int hidden);

struct CurveRow {
    long step = 0;
    double train_loss = 0.0; // means over the steps since the previous row
    double l_omega = 0.0;
    double l_u = 0.0;
    double val_slowdown = 0.0;
};

std::string curve_csv(const std::vector<CurveRow> &rows);

struct TrainResult {
    PolicyNet best; // lowest validation slowdown
    PolicyNet last;
    std::vector<CurveRow> curve;
    double best_val = 0.0;
};

/// Seeds of the training pool, validation set and held-out test set are
/// disjoint streams of `config.seed`.
std::uint64_t train_instance_seed(std::uint64_t seed, int index);
std::uint64_t val_instance_seed(std::uint64_t seed, int index);
std::uint64_t test_instance_seed(std::uint64_t seed, int index);

/// Mean online slowdown of ROARS under `net` over `instances`.
double evaluate_policy(const std::shared_ptr<const PolicyNet> &net,
                       const std::vector<std::shared_ptr<const Instance>> &instances, const SearchConfig &search,
                       PickMode mode, int queue_capacity);

/// Actor-critic training on rewrites of first-come-first-served schedules.
/// Each step rolls out `batch` episodes in parallel, averages their loss
/// gradients in a fixed order and applies one Adam step. Throws
/// std::runtime_error on a non-finite loss.
TrainResult train(const TrainConfig &config, const GenConfig &gen, const SearchConfig &search,
                  const std::function<void(const CurveRow &)> &on_row = {});

} // namespace roars
