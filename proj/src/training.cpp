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

#include "roars/training.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "roars/parallel.hpp"

namespace roars {

double TrainConfig::lr_at(long step) const {
    return lr0 * std::pow(lr_decay, static_cast<double>(step / lr_decay_every));
}

void TrainConfig::validate() const {
    if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (episode_steps < 1) throw std::invalid_argument("episode_steps must be >= 1");
    if (!(alpha > 0.0) || !(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("alpha > 0, gamma in [0,1]");
    if (!(lr0 > 0.0) || !(lr_decay > 0.0) || lr_decay_every < 1)
        throw std::invalid_argument("learning-rate schedule must be positive");
    if (pool_size < 1 || val_every < 1 || val_instances < 1 || queue_capacity < 1)
        throw std::invalid_argument("pool_size, val_every, val_instances and queue_capacity must be >= 1");
}

TrainConfig train_config_from_json(const std::string &text) {
    const auto j = nlohmann::json::parse(text);
    TrainConfig c;
    c.hidden = j.value("hidden", c.hidden);
    c.steps = j.value("steps", c.steps);
    c.batch = j.value("batch", c.batch);
    c.episode_steps = j.value("episode_steps", c.episode_steps);
    c.alpha = j.value("alpha", c.alpha);
    c.gamma = j.value("gamma", c.gamma);
    c.lr0 = j.value("lr0", c.lr0);
    c.lr_decay = j.value("lr_decay", c.lr_decay);
    c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
    c.pool_size = j.value("pool_size", c.pool_size);
    c.val_every = j.value("val_every", c.val_every);
    c.val_instances = j.value("val_instances", c.val_instances);
    if (j.contains("eval_mode")) c.eval_mode = parse_pick_mode(j["eval_mode"].get<std::string>());
    c.queue_capacity = j.value("queue_capacity", c.queue_capacity);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

PolicyDims dims_for(const GenConfig &gen, int hidden) {
    PolicyDims d;
    d.hidden = hidden;
    d.num_sites = gen.num_sites;
    d.num_filters = gen.num_filters;
    d.e_max = std::max(gen.exposure_long.hi, gen.exposure_short.hi);
    d.distributed = gen.num_sites > 1;
    return d;
}

std::string curve_csv(const std::vector<CurveRow> &rows) {
    std::string out = "step,train_loss,L_w,L_u,val_slowdown\n";
    char buf[256];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%ld,%.6f,%.6f,%.6f,%.6f\n", r.step, r.train_loss, r.l_omega, r.l_u,
                      r.val_slowdown);
        out += buf;
    }
    return out;
}

std::uint64_t train_instance_seed(std::uint64_t seed, int index) {
    return derive_seed(derive_seed(seed, 1), static_cast<std::uint64_t>(index));
}
std::uint64_t val_instance_seed(std::uint64_t seed, int index) {
    return derive_seed(derive_seed(seed, 2), static_cast<std::uint64_t>(index));
}
std::uint64_t test_instance_seed(std::uint64_t seed, int index) {
    return derive_seed(derive_seed(seed, 3), static_cast<std::uint64_t>(index));
}

double evaluate_policy(const std::shared_ptr<const PolicyNet> &net,
                       const std::vector<std::shared_ptr<const Instance>> &instances, const SearchConfig &search,
                       PickMode mode, int queue_capacity) {
    if (instances.empty()) throw std::invalid_argument("evaluate_policy: no instances");
    std::vector<double> per(instances.size());
    const auto spec = SchedulerSpec::roars(net, search, mode);
    parallel::for_each_index_omp(static_cast<int>(instances.size()), [&](int i) {
        per[static_cast<std::size_t>(i)] =
            run_online(instances[static_cast<std::size_t>(i)], spec, queue_capacity).avg_slowdown();
    });
    double sum = 0.0;
    for (double v : per) sum += v;
    return sum / static_cast<double>(per.size());
}

namespace {

struct PoolEntry {
    std::shared_ptr<const Instance> inst;
    ScheduleDag initial;
};

std::vector<std::shared_ptr<const Instance>> build_instances(const GenConfig &gen, int count,
                                                             std::uint64_t (*seed_of)(std::uint64_t, int),
                                                             std::uint64_t seed) {
    std::vector<std::shared_ptr<const Instance>> out(static_cast<std::size_t>(count));
    parallel::for_each_index_omp(count, [&](int i) {
        out[static_cast<std::size_t>(i)] = Instance::build(generate_scenario(gen, seed_of(seed, i)), false);
    });
    return out;
}

struct Episode {
    LossTerms loss;
    bool empty = true;
};

Episode roll_out(const PolicyNet &net, const PoolEntry &entry, const TrainConfig &tc, const SearchConfig &search,
                 double p_c, std::uint64_t seed, Eigen::VectorXd &grad) {
    Rng rng(seed);
    std::vector<PolicyStep> traj;
    ScheduleDag dag = entry.initial;
    double cost = dag.total_slowdown();
    for (int t = 0; t < tc.episode_steps; ++t) {
        if (candidate_regions(dag).empty()) break;
        PolicyStep step;
        const auto action = policy_action(net, dag, search, PickMode::Sample, p_c, rng, &step);
        auto res = rewrite_step(dag, action);
        if (res.changed) {
            const double next = res.dag.total_slowdown();
            step.reward = cost - next;
            cost = next;
            dag = std::move(res.dag);
        }
        traj.push_back(std::move(step));
    }
    Episode ep;
    if (traj.empty()) return ep;
    ep.empty = false;
    ep.loss = trajectory_loss(net, traj, LossSettings{tc.gamma, tc.alpha, true}, &grad);
    return ep;
}

} // namespace

TrainResult train(const TrainConfig &tc, const GenConfig &gen, const SearchConfig &search,
                  const std::function<void(const CurveRow &)> &on_row) {
    tc.validate();
    search.validate();
    const PolicyDims dims = dims_for(gen, tc.hidden);
    PolicyNet net(dims, derive_seed(tc.seed, 0));
    Adam adam(net.params().size());

    const auto pool_instances = build_instances(gen, tc.pool_size, train_instance_seed, tc.seed);
    std::vector<PoolEntry> pool(pool_instances.size());
    parallel::for_each_index_omp(tc.pool_size, [&](int i) {
        const auto &inst = pool_instances[static_cast<std::size_t>(i)];
        pool[static_cast<std::size_t>(i)] = PoolEntry{inst, schedule_online_heuristic(inst, TaskRule::FCFS).dag};
    });
    const auto val = build_instances(gen, tc.val_instances, val_instance_seed, tc.seed);

    TrainResult result;
    result.best_val = std::numeric_limits<double>::infinity();
    double acc_loss = 0.0, acc_w = 0.0, acc_u = 0.0;
    long acc_n = 0;
    std::vector<Eigen::VectorXd> grads(static_cast<std::size_t>(tc.batch));
    std::vector<Episode> episodes(static_cast<std::size_t>(tc.batch));
    Rng sampler(derive_seed(tc.seed, 4));

    for (long step = 0; step < tc.steps; ++step) {
        std::vector<int> picks(static_cast<std::size_t>(tc.batch));
        for (auto &p : picks) p = sampler.uniform_int(0, tc.pool_size - 1);
        const double p_c = search.pc_at(step);
        const std::uint64_t step_seed = derive_seed(derive_seed(tc.seed, 5), static_cast<std::uint64_t>(step));
        parallel::for_each_index_omp(tc.batch, [&](int b) {
            auto &g = grads[static_cast<std::size_t>(b)];
            g.setZero(net.params().size());
            episodes[static_cast<std::size_t>(b)] =
                roll_out(net, pool[static_cast<std::size_t>(picks[static_cast<std::size_t>(b)])], tc, search, p_c,
                         derive_seed(step_seed, static_cast<std::uint64_t>(b)), g);
        });

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.params().size());
        int used = 0;
        double loss = 0.0, lw = 0.0, lu = 0.0;
        for (int b = 0; b < tc.batch; ++b) {
            const auto &ep = episodes[static_cast<std::size_t>(b)];
            if (ep.empty) continue;
            grad += grads[static_cast<std::size_t>(b)];
            loss += ep.loss.total;
            lw += ep.loss.l_omega;
            lu += ep.loss.l_u;
            ++used;
        }
        if (used > 0) {
            grad /= static_cast<double>(used);
            loss /= used;
            lw /= used;
            lu /= used;
            if (!std::isfinite(loss) || !grad.allFinite())
                throw std::runtime_error("training diverged at step " + std::to_string(step));
            adam.step(net.params(), grad, tc.lr_at(step));
        }
        net.train_step = step + 1;
        acc_loss += loss;
        acc_w += lw;
        acc_u += lu;
        ++acc_n;

        if ((step + 1) % tc.val_every == 0 || step + 1 == tc.steps) {
            auto snapshot = std::make_shared<const PolicyNet>(net);
            CurveRow row{step + 1, acc_loss / acc_n, acc_w / acc_n, acc_u / acc_n,
                         evaluate_policy(snapshot, val, search, tc.eval_mode, tc.queue_capacity)};
            acc_loss = acc_w = acc_u = 0.0;
            acc_n = 0;
            result.curve.push_back(row);
            if (row.val_slowdown < result.best_val) {
                result.best_val = row.val_slowdown;
                result.best = net;
            }
            if (on_row) on_row(row);
        }
    }
    if (result.curve.empty()) result.best = net;
    result.last = std::move(net);
    return result;
}

} // namespace roars
