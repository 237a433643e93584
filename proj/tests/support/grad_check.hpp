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

// Central-difference check of trajectory_loss gradients.

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "roars/heuristics.hpp"
#include "roars/policy.hpp"

namespace roars::testing {

/// Random single-site schedule with `lo`..`hi` scheduled tasks.
inline ScheduleDag random_small_dag(std::uint64_t seed, int lo, int hi) {
    Rng rng(seed);
    for (;;) {
        std::vector<TargetSpec> specs;
        const int n = rng.uniform_int(lo, hi);
        for (int i = 0; i < n; ++i)
            specs.push_back(single(rng.uniform_int(0, 12), rng.uniform_int(1, 6),
                                   static_cast<unsigned>(rng.uniform_int(1, 7)), rng.uniform_int(5, 30)));
        const auto inst = make_instance(specs, 1, 3, 80);
        auto r = schedule_online_heuristic(inst, TaskRule::FCFS);
        if (r.dag.size() >= lo && r.dag.size() <= hi) return std::move(r.dag);
    }
}

struct GradCheck {
    double max_rel_error = 0.0;
    long parameters = 0;
    int steps = 0;
};

/// Rolls out `steps` sampled rewrites from `dag` and compares the analytic
/// gradient of the loss with central differences (advantages frozen at
/// the unperturbed parameters). Relative errors use the denominator
/// max(|a|, |f|, 1e-6 (1 + |L|)), which keeps round-off in near-zero
/// components from dominating.
inline GradCheck check_gradient(const ScheduleDag &dag, int hidden, std::uint64_t seed, int steps = 3,
                                double h = 1e-5) {
    PolicyDims dims;
    dims.hidden = hidden;
    dims.num_filters = dag.instance().num_filters;
    dims.e_max = dag.instance().max_exposure;
    PolicyNet net(dims, seed);
    Rng rng(derive_seed(seed, 1));
    std::vector<PolicyStep> traj;
    ScheduleDag cur = dag;
    for (int t = 0; t < steps && !candidate_regions(cur).empty(); ++t) {
        PolicyStep st;
        const auto a = policy_action(net, cur, SearchConfig{}, PickMode::Sample, 0.5, rng, &st);
        const auto r = rewrite_step(cur, a);
        st.reward = cur.total_slowdown() - r.dag.total_slowdown();
        cur = r.dag;
        traj.push_back(std::move(st));
    }
    GradCheck out;
    out.steps = static_cast<int>(traj.size());
    out.parameters = static_cast<long>(net.params().size());
    if (traj.empty()) return out;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.params().size());
    const auto base = trajectory_loss(net, traj, LossSettings{}, &grad);
    const auto adv = base.advantages;
    const double floor = 1e-6 * (1.0 + std::abs(base.total));
    for (Eigen::Index k = 0; k < net.params().size(); ++k) {
        const double old = net.params()(k);
        net.params()(k) = old + h;
        const double lp = trajectory_loss(net, traj, LossSettings{}, nullptr, &adv).total;
        net.params()(k) = old - h;
        const double lm = trajectory_loss(net, traj, LossSettings{}, nullptr, &adv).total;
        net.params()(k) = old;
        const double fd = (lp - lm) / (2 * h);
        const double rel = std::abs(fd - grad(k)) / std::max({std::abs(fd), std::abs(grad(k)), floor});
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

} // namespace roars::testing
