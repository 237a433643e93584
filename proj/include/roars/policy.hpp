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

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "roars/rewriter.hpp"

namespace roars {

/// Shape of a policy network and of the schedules it can read.
struct PolicyDims {
    int hidden = 64;
    int num_sites = 1;
    int num_filters = 3;
    int e_max = 20;
    bool distributed = false;

    int input_size() const { return embedding_length(num_sites, num_filters, e_max, distributed); }
    bool operator==(const PolicyDims &) const = default;
};

enum class Tensor {
    GateW,  // 4H x d_in, rows ordered (input, forget, output, candidate)
    GateU,  // 4H x H
    GateB,  // 4H
    RegW1,  // H x H
    RegB1,
    RegW2,  // H x H
    RegB2,
    RegW3,  // 1 x H
    RegB3,
    RuleW1, // H x 2H
    RuleB1,
    RuleW2, // H x H
    RuleB2,
    RuleW3, // 1 x H
    RuleB3,
};
inline constexpr int kNumTensors = 15;

struct TensorInfo {
    std::string name;
    int rows = 0;
    int cols = 0;
    Eigen::Index offset = 0;
    Eigen::Index size() const { return static_cast<Eigen::Index>(rows) * cols; }
};

/// Child-Sum Tree-LSTM encoder plus region-score and rule heads. All
/// parameters live in one flat vector; tensors are column-major views.
class PolicyNet {
  public:
    PolicyNet() = default;
    /// Weights drawn uniformly from [-0.1, 0.1].
    PolicyNet(const PolicyDims &dims, std::uint64_t seed);

    const PolicyDims &dims() const { return dims_; }
    const std::vector<TensorInfo> &layout() const { return layout_; }
    Eigen::VectorXd &params() { return params_; }
    const Eigen::VectorXd &params() const { return params_; }
    long train_step = 0;

    Eigen::Map<const Eigen::MatrixXd> tensor(Tensor t) const { return view(params_.data(), t); }
    Eigen::Map<Eigen::MatrixXd> tensor_of(Eigen::VectorXd &flat, Tensor t) const { return view(flat.data(), t); }

    /// Throws std::invalid_argument unless `inst` matches the network's
    /// site/filter dimensions and exposures fit in e_max.
    void check_compatible(const Instance &inst) const;

  private:
    template <class P>
    Eigen::Map<std::conditional_t<std::is_const_v<P>, const Eigen::MatrixXd, Eigen::MatrixXd>> view(P *base,
                                                                                                    Tensor t) const {
        const auto &info = layout_[static_cast<std::size_t>(t)];
        return {base + info.offset, info.rows, info.cols};
    }

    PolicyDims dims_;
    std::vector<TensorInfo> layout_;
    Eigen::VectorXd params_;
};

/// Forward state of the encoder over one schedule. Column n belongs to
/// node `nodes[n]`: the site roots first, then scheduled tasks in
/// topological order.
struct Encoding {
    std::vector<int> nodes;
    std::vector<int> column_of_task;       // -1 when unscheduled
    std::vector<std::vector<int>> parents; // column indices
    Eigen::MatrixXd x;                     // d_in x N inputs
    Eigen::MatrixXd gates;                 // 4H x N activated gates
    Eigen::MatrixXd c;                     // H x N
    Eigen::MatrixXd h;                     // H x N
    Eigen::MatrixXd c_sum;                 // H x N parent sums
    Eigen::MatrixXd h_sum;

    int column(int node) const;
    Eigen::VectorXd hidden(int node) const { return h.col(column(node)); }
};

/// Runs the encoder over every node. Roots get a zero input and zero
/// parent state.
Encoding encode(const PolicyNet &net, const ScheduleDag &dag);

/// Same as encode() but parents taken from `parent_lists` (node ids, one
/// list per node of `order`), for testing the encoder on arbitrary graphs.
Encoding encode_graph(const PolicyNet &net, const std::vector<int> &order,
                      const std::vector<std::vector<int>> &parent_lists, const Eigen::MatrixXd &inputs);

/// Region scores Q(s, w) for each candidate task.
Eigen::VectorXd region_scores(const PolicyNet &net, const Encoding &enc, const std::vector<int> &candidates);

/// Rule-head logits for (region, candidate parent) pairs.
Eigen::VectorXd rule_logits(const PolicyNet &net, const Encoding &enc, int region, const std::vector<Rule> &candidates);

/// Max-shifted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd &z);
Eigen::VectorXd log_softmax(const Eigen::VectorXd &z);

Eigen::VectorXd region_distribution(const PolicyNet &net, const Encoding &enc, const std::vector<int> &candidates);
Eigen::VectorXd rule_distribution(const PolicyNet &net, const Encoding &enc, int region,
                                  const std::vector<Rule> &candidates);

struct LossTerms {
    double l_omega = 0.0;
    double l_u = 0.0;
    double total = 0.0;
    std::vector<double> returns;    // G_t
    std::vector<double> advantages; // G_t - Q_t
};

/// L_w = mean (G_t - Q_t)^2, L_u = -sum A_t log pi_u(u_t), L = L_u + alpha L_w,
/// with G_t the gamma-discounted return. Throws on an empty trajectory.
LossTerms losses(const std::vector<double> &rewards, const std::vector<double> &q, const std::vector<double> &log_pi_u,
                 double gamma, double alpha);

/// One recorded rewrite decision, enough to replay the forward pass.
struct PolicyStep {
    ScheduleDag state;
    std::vector<int> regions; // scored candidates
    int region_index = 0;
    std::vector<Rule> rules;
    int rule_index = 0;
    double reward = 0.0;
    /// Encoder state at record time; valid only for the parameters that
    /// produced it.
    std::shared_ptr<const Encoding> encoding;
};

struct LossSettings {
    double gamma = 0.9;
    double alpha = 10.0;
    /// Skip the encoder forward pass when a step carries its encoding.
    bool reuse_recorded_encodings = false;
};

/// Loss of one trajectory under `net`. When `grad` is given the gradient is
/// added into it. With `frozen_advantages` the actor term uses those instead
/// of the current G_t - Q_t.
LossTerms trajectory_loss(const PolicyNet &net, const std::vector<PolicyStep> &trajectory, const LossSettings &settings,
                          Eigen::VectorXd *grad = nullptr, const std::vector<double> *frozen_advantages = nullptr);

enum class PickMode { Greedy, Sample };
std::string to_string(PickMode mode);
PickMode parse_pick_mode(const std::string &name);

/// Draws at most `budget` items uniformly without replacement, keeping
/// their original relative order.
template <class T>
std::vector<T> subsample(const std::vector<T> &items, int budget, Rng &rng) {
    if (static_cast<int>(items.size()) <= budget) return items;
    auto idx = rng.sample_without_replacement(static_cast<int>(items.size()), budget);
    std::sort(idx.begin(), idx.end());
    std::vector<T> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(items[static_cast<std::size_t>(i)]);
    return out;
}

/// Chooses a rewrite with the network. Sample mode takes the arg-max region
/// with probability p_c and otherwise samples the region softmax; the rule
/// is drawn from the rule softmax. Greedy mode takes both arg-maxes. When
/// `record` is set the decision is stored there (reward left at 0).
RewriteAction policy_action(const PolicyNet &net, const ScheduleDag &dag, const SearchConfig &config, PickMode mode,
                            double p_c, Rng &rng, PolicyStep *record = nullptr);

class PolicyPicker final : public ActionPicker {
  public:
    PolicyPicker(const PolicyNet &net, SearchConfig config, PickMode mode);
    RewriteAction pick(const ScheduleDag &dag, Rng &rng) override;

  private:
    const PolicyNet &net_;
    SearchConfig config_;
    PickMode mode_;
};

class Adam {
  public:
    explicit Adam(Eigen::Index size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(Eigen::VectorXd &params, const Eigen::VectorXd &grad, double lr);
    long steps() const { return t_; }

  private:
    double beta1_, beta2_, eps_;
    long t_ = 0;
    Eigen::VectorXd m_, v_;
};

class CheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// JSON: {"header": {version, hidden, d_in, sites, filters, e_max,
/// distributed, train_step, layers: [{name, rows, cols}]}, "tensors":
/// [{name, data}]}. Doubles round-trip exactly.
void save_checkpoint(const PolicyNet &net, const std::string &path);
PolicyNet load_checkpoint(const std::string &path);
/// Also checks the stored dimensions against `expected`.
PolicyNet load_checkpoint(const std::string &path, const PolicyDims &expected);

} // namespace roars
