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

#include "roars/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace roars {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<TensorInfo> make_layout(const PolicyDims &d) {
    const int h = d.hidden;
    const int in = d.input_size();
    const std::vector<std::tuple<const char *, int, int>> shapes{
        {"gate_w", 4 * h, in}, {"gate_u", 4 * h, h}, {"gate_b", 4 * h, 1},  {"reg_w1", h, h},      {"reg_b1", h, 1},
        {"reg_w2", h, h},      {"reg_b2", h, 1},     {"reg_w3", 1, h},      {"reg_b3", 1, 1},      {"rule_w1", h, 2 * h},
        {"rule_b1", h, 1},     {"rule_w2", h, h},    {"rule_b2", h, 1},     {"rule_w3", 1, h},     {"rule_b3", 1, 1},
    };
    std::vector<TensorInfo> out;
    Eigen::Index offset = 0;
    for (const auto &[name, rows, cols] : shapes) {
        out.push_back({name, rows, cols, offset});
        offset += static_cast<Eigen::Index>(rows) * cols;
    }
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Three-layer perceptron head: in -> relu(W1) -> relu(W2) -> W3 (scalar).
struct Mlp {
    Tensor w1, b1, w2, b2, w3, b3;
};
constexpr Mlp kRegionHead{Tensor::RegW1, Tensor::RegB1, Tensor::RegW2, Tensor::RegB2, Tensor::RegW3, Tensor::RegB3};
constexpr Mlp kRuleHead{Tensor::RuleW1, Tensor::RuleB1, Tensor::RuleW2, Tensor::RuleB2, Tensor::RuleW3, Tensor::RuleB3};

struct MlpTrace {
    MatrixXd in, a1, a2;
    VectorXd out;
};

MlpTrace mlp_forward(const PolicyNet &net, const Mlp &m, MatrixXd in) {
    MlpTrace tr;
    tr.in = std::move(in);
    tr.a1 = ((net.tensor(m.w1) * tr.in).colwise() + net.tensor(m.b1).col(0)).cwiseMax(0.0);
    tr.a2 = ((net.tensor(m.w2) * tr.a1).colwise() + net.tensor(m.b2).col(0)).cwiseMax(0.0);
    tr.out = ((net.tensor(m.w3) * tr.a2).array() + net.tensor(m.b3)(0, 0)).matrix().transpose();
    return tr;
}

// Accumulates parameter gradients into `grad`; returns d(loss)/d(in).
MatrixXd mlp_backward(const PolicyNet &net, const Mlp &m, const MlpTrace &tr, const VectorXd &dout,
                      VectorXd &grad) {
    const MatrixXd dout_row = dout.transpose();
    net.tensor_of(grad, m.w3).noalias() += dout_row * tr.a2.transpose();
    net.tensor_of(grad, m.b3)(0, 0) += dout.sum();
    MatrixXd da2 = (net.tensor(m.w3).transpose() * dout_row).cwiseProduct((tr.a2.array() > 0.0).cast<double>().matrix());
    net.tensor_of(grad, m.w2).noalias() += da2 * tr.a1.transpose();
    net.tensor_of(grad, m.b2).col(0) += da2.rowwise().sum();
    MatrixXd da1 = (net.tensor(m.w2).transpose() * da2).cwiseProduct((tr.a1.array() > 0.0).cast<double>().matrix());
    net.tensor_of(grad, m.w1).noalias() += da1 * tr.in.transpose();
    net.tensor_of(grad, m.b1).col(0) += da1.rowwise().sum();
    return net.tensor(m.w1).transpose() * da1;
}

Encoding run_encoder(const PolicyNet &net, Encoding enc) {
    const int hd = net.dims().hidden;
    const auto n = static_cast<Eigen::Index>(enc.nodes.size());
    MatrixXd pre = (net.tensor(Tensor::GateW) * enc.x).colwise() + net.tensor(Tensor::GateB).col(0);
    enc.gates.resize(4 * hd, n);
    enc.c.resize(hd, n);
    enc.h.resize(hd, n);
    enc.c_sum = MatrixXd::Zero(hd, n);
    enc.h_sum = MatrixXd::Zero(hd, n);
    const auto u = net.tensor(Tensor::GateU);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto &ps = enc.parents[static_cast<std::size_t>(k)];
        for (int p : ps) {
            enc.h_sum.col(k) += enc.h.col(p);
            enc.c_sum.col(k) += enc.c.col(p);
        }
        VectorXd g = pre.col(k);
        if (!ps.empty()) g.noalias() += u * enc.h_sum.col(k);
        for (int r = 0; r < 3 * hd; ++r) g(r) = sigmoid(g(r));
        for (int r = 3 * hd; r < 4 * hd; ++r) g(r) = std::tanh(g(r));
        enc.gates.col(k) = g;
        const auto i = g.segment(0, hd).array();
        const auto f = g.segment(hd, hd).array();
        const auto o = g.segment(2 * hd, hd).array();
        const auto cand = g.segment(3 * hd, hd).array();
        enc.c.col(k) = (f * enc.c_sum.col(k).array() + i * cand).matrix();
        enc.h.col(k) = (o * enc.c.col(k).array().tanh()).matrix();
    }
    return enc;
}

// Backpropagates dh (H x N) through the encoder into `grad`.
void encoder_backward(const PolicyNet &net, const Encoding &enc, MatrixXd dh, VectorXd &grad) {
    const int hd = net.dims().hidden;
    const auto n = static_cast<Eigen::Index>(enc.nodes.size());
    MatrixXd dc = MatrixXd::Zero(hd, n);
    MatrixXd dgates(4 * hd, n);
    const auto u = net.tensor(Tensor::GateU);
    auto du_acc = net.tensor_of(grad, Tensor::GateU);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const auto g = enc.gates.col(k).array();
        const auto i = g.segment(0, hd);
        const auto f = g.segment(hd, hd);
        const auto o = g.segment(2 * hd, hd);
        const auto cand = g.segment(3 * hd, hd);
        const Eigen::ArrayXd tc = enc.c.col(k).array().tanh();
        const Eigen::ArrayXd dhk = dh.col(k).array();
        const Eigen::ArrayXd dck = dc.col(k).array() + dhk * o * (1.0 - tc * tc);
        dgates.col(k).segment(0, hd) = (dck * cand * i * (1.0 - i)).matrix();
        dgates.col(k).segment(hd, hd) = (dck * enc.c_sum.col(k).array() * f * (1.0 - f)).matrix();
        dgates.col(k).segment(2 * hd, hd) = (dhk * tc * o * (1.0 - o)).matrix();
        dgates.col(k).segment(3 * hd, hd) = (dck * i * (1.0 - cand * cand)).matrix();
        const auto &ps = enc.parents[static_cast<std::size_t>(k)];
        if (ps.empty()) continue;
        du_acc.noalias() += dgates.col(k) * enc.h_sum.col(k).transpose();
        const VectorXd dhs = u.transpose() * dgates.col(k);
        const VectorXd dcs = (dck * f).matrix();
        for (int p : ps) {
            dh.col(p) += dhs;
            dc.col(p) += dcs;
        }
    }
    net.tensor_of(grad, Tensor::GateW).noalias() += dgates * enc.x.transpose();
    net.tensor_of(grad, Tensor::GateB).col(0) += dgates.rowwise().sum();
}

MatrixXd rule_inputs(const Encoding &enc, int region, const std::vector<Rule> &candidates) {
    const auto hd = enc.h.rows();
    MatrixXd in(2 * hd, static_cast<Eigen::Index>(candidates.size()));
    const int rc = enc.column(region);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        in.col(static_cast<Eigen::Index>(k)).head(hd) = enc.h.col(rc);
        in.col(static_cast<Eigen::Index>(k)).tail(hd) = enc.h.col(enc.column(candidates[k].node));
    }
    return in;
}

MatrixXd region_inputs(const Encoding &enc, const std::vector<int> &candidates) {
    MatrixXd in(enc.h.rows(), static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t k = 0; k < candidates.size(); ++k)
        in.col(static_cast<Eigen::Index>(k)) = enc.h.col(enc.column(candidates[k]));
    return in;
}

Eigen::Index argmax(const VectorXd &v) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k)
        if (v(k) > v(best)) best = k;
    return best;
}

Eigen::Index draw(const VectorXd &probs, Rng &rng) {
    return static_cast<Eigen::Index>(rng.categorical(std::vector<double>(probs.data(), probs.data() + probs.size())));
}

} // namespace

PolicyNet::PolicyNet(const PolicyDims &dims, std::uint64_t seed) : dims_(dims), layout_(make_layout(dims)) {
    if (dims.hidden < 1 || dims.num_sites < 1 || dims.num_filters < 1 || dims.e_max < 1)
        throw std::invalid_argument("policy dimensions must be positive");
    const auto &last = layout_.back();
    params_.resize(last.offset + last.size());
    Rng rng(seed);
    for (Eigen::Index k = 0; k < params_.size(); ++k) params_(k) = rng.uniform(-0.1, 0.1);
}

void PolicyNet::check_compatible(const Instance &inst) const {
    if (inst.num_filters != dims_.num_filters)
        throw std::invalid_argument("policy expects " + std::to_string(dims_.num_filters) + " filters, scenario has " +
                                    std::to_string(inst.num_filters));
    if (dims_.distributed ? inst.num_sites != dims_.num_sites : inst.num_sites != 1)
        throw std::invalid_argument("policy expects " + std::to_string(dims_.distributed ? dims_.num_sites : 1) +
                                    " sites, scenario has " + std::to_string(inst.num_sites));
    if (inst.max_exposure > dims_.e_max)
        throw std::invalid_argument("scenario exposure " + std::to_string(inst.max_exposure) + " exceeds policy e_max " +
                                    std::to_string(dims_.e_max));
}

int Encoding::column(int node) const {
    if (is_root(node)) return root_site(node);
    const int c = column_of_task.at(static_cast<std::size_t>(node));
    if (c < 0) throw std::out_of_range("task is not part of the encoding");
    return c;
}

Encoding encode(const PolicyNet &net, const ScheduleDag &dag) {
    const auto &dims = net.dims();
    const int sites = dag.num_sites();
    Encoding enc;
    enc.column_of_task.assign(static_cast<std::size_t>(dag.instance().num_tasks()), -1);
    for (int s = 0; s < sites; ++s) enc.nodes.push_back(root_node(s));
    for (int t : dag.topological_order()) {
        enc.column_of_task[static_cast<std::size_t>(t)] = static_cast<int>(enc.nodes.size());
        enc.nodes.push_back(t);
    }
    const auto n = static_cast<Eigen::Index>(enc.nodes.size());
    const int d_in = dims.input_size();
    enc.x = MatrixXd::Zero(d_in, n);
    enc.parents.resize(enc.nodes.size());
    for (Eigen::Index k = sites; k < n; ++k) {
        const int t = enc.nodes[static_cast<std::size_t>(k)];
        embed_into(dag, t, dims.distributed, dims.e_max, std::span<double>(enc.x.col(k).data(), d_in));
        for (int p : dag.parents(t)) {
            const int col = enc.column(p);
            if (col >= k) throw std::logic_error("encode: schedule graph is not topologically ordered");
            enc.parents[static_cast<std::size_t>(k)].push_back(col);
        }
    }
    return run_encoder(net, std::move(enc));
}

Encoding encode_graph(const PolicyNet &net, const std::vector<int> &order,
                      const std::vector<std::vector<int>> &parent_lists, const MatrixXd &inputs) {
    if (parent_lists.size() != order.size() || inputs.cols() != static_cast<Eigen::Index>(order.size()) ||
        inputs.rows() != net.dims().input_size())
        throw std::invalid_argument("encode_graph: inconsistent sizes");
    Encoding enc;
    enc.nodes = order;
    int max_id = 0;
    for (int v : order) max_id = std::max(max_id, v);
    enc.column_of_task.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] < 0) throw std::invalid_argument("encode_graph: node ids must be >= 0");
        enc.column_of_task[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
    }
    enc.parents.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        for (int p : parent_lists[k]) {
            const int col = enc.column(p);
            if (col >= static_cast<int>(k)) throw std::invalid_argument("encode_graph: order is not topological");
            enc.parents[k].push_back(col);
        }
    enc.x = inputs;
    return run_encoder(net, std::move(enc));
}

VectorXd region_scores(const PolicyNet &net, const Encoding &enc, const std::vector<int> &candidates) {
    return mlp_forward(net, kRegionHead, region_inputs(enc, candidates)).out;
}

VectorXd rule_logits(const PolicyNet &net, const Encoding &enc, int region, const std::vector<Rule> &candidates) {
    return mlp_forward(net, kRuleHead, rule_inputs(enc, region, candidates)).out;
}

VectorXd softmax(const VectorXd &z) {
    if (z.size() == 0) throw std::invalid_argument("softmax of an empty vector");
    const VectorXd e = (z.array() - z.maxCoeff()).exp().matrix();
    return e / e.sum();
}

VectorXd log_softmax(const VectorXd &z) {
    if (z.size() == 0) throw std::invalid_argument("softmax of an empty vector");
    const double m = z.maxCoeff();
    const double lse = m + std::log((z.array() - m).exp().sum());
    return (z.array() - lse).matrix();
}

VectorXd region_distribution(const PolicyNet &net, const Encoding &enc, const std::vector<int> &candidates) {
    if (candidates.empty()) throw std::invalid_argument("region_distribution: no candidates");
    return softmax(region_scores(net, enc, candidates));
}

VectorXd rule_distribution(const PolicyNet &net, const Encoding &enc, int region, const std::vector<Rule> &candidates) {
    if (candidates.empty()) throw std::invalid_argument("rule_distribution: no candidates");
    return softmax(rule_logits(net, enc, region, candidates));
}

LossTerms losses(const std::vector<double> &rewards, const std::vector<double> &q, const std::vector<double> &log_pi_u,
                 double gamma, double alpha) {
    const std::size_t t_len = rewards.size();
    if (t_len == 0) throw std::invalid_argument("losses: empty trajectory");
    if (q.size() != t_len || log_pi_u.size() != t_len) throw std::invalid_argument("losses: length mismatch");
    LossTerms out;
    out.returns.assign(t_len, 0.0);
    double g = 0.0;
    for (std::size_t k = t_len; k-- > 0;) {
        g = rewards[k] + gamma * g;
        out.returns[k] = g;
    }
    out.advantages.resize(t_len);
    for (std::size_t k = 0; k < t_len; ++k) {
        const double a = out.returns[k] - q[k];
        out.advantages[k] = a;
        out.l_omega += a * a;
        out.l_u -= a * log_pi_u[k];
    }
    out.l_omega /= static_cast<double>(t_len);
    out.total = out.l_u + alpha * out.l_omega;
    return out;
}

LossTerms trajectory_loss(const PolicyNet &net, const std::vector<PolicyStep> &trajectory, const LossSettings &settings,
                          VectorXd *grad, const std::vector<double> *frozen_advantages) {
    const std::size_t t_len = trajectory.size();
    if (t_len == 0) throw std::invalid_argument("trajectory_loss: empty trajectory");
    if (frozen_advantages && frozen_advantages->size() != t_len)
        throw std::invalid_argument("trajectory_loss: advantage count mismatch");

    std::vector<std::shared_ptr<const Encoding>> encs;
    std::vector<MlpTrace> region_tr, rule_tr;
    std::vector<VectorXd> rule_logp;
    std::vector<double> rewards(t_len), q(t_len), logp(t_len);
    encs.reserve(t_len);
    for (std::size_t k = 0; k < t_len; ++k) {
        const auto &st = trajectory[k];
        if (settings.reuse_recorded_encodings && st.encoding)
            encs.push_back(st.encoding);
        else
            encs.push_back(std::make_shared<const Encoding>(encode(net, st.state)));
        const int region = st.regions.at(static_cast<std::size_t>(st.region_index));
        region_tr.push_back(mlp_forward(net, kRegionHead, region_inputs(*encs.back(), {region})));
        rule_tr.push_back(mlp_forward(net, kRuleHead, rule_inputs(*encs.back(), region, st.rules)));
        rule_logp.push_back(log_softmax(rule_tr.back().out));
        rewards[k] = st.reward;
        q[k] = region_tr.back().out(0);
        logp[k] = rule_logp.back()(st.rule_index);
    }
    LossTerms out = losses(rewards, q, logp, settings.gamma, settings.alpha);
    const auto &adv = frozen_advantages ? *frozen_advantages : out.advantages;
    if (frozen_advantages) {
        out.l_u = 0.0;
        for (std::size_t k = 0; k < t_len; ++k) out.l_u -= adv[k] * logp[k];
        out.total = out.l_u + settings.alpha * out.l_omega;
    }
    if (!std::isfinite(out.total)) throw std::runtime_error("trajectory_loss: non-finite loss");
    if (!grad) return out;

    for (std::size_t k = 0; k < t_len; ++k) {
        const auto &st = trajectory[k];
        const auto &enc = *encs[k];
        const int region = st.regions[static_cast<std::size_t>(st.region_index)];
        MatrixXd dh = MatrixXd::Zero(enc.h.rows(), enc.h.cols());

        VectorXd dq(1);
        dq(0) = -2.0 * settings.alpha * (out.returns[k] - q[k]) / static_cast<double>(t_len);
        dh.col(enc.column(region)) += mlp_backward(net, kRegionHead, region_tr[k], dq, *grad).col(0);

        // d(-A log pi_u)/dz = A (pi - onehot)
        VectorXd dz = rule_logp[k].array().exp().matrix() * adv[k];
        dz(st.rule_index) -= adv[k];
        const MatrixXd din = mlp_backward(net, kRuleHead, rule_tr[k], dz, *grad);
        const auto hd = enc.h.rows();
        dh.col(enc.column(region)) += din.topRows(hd).rowwise().sum();
        for (std::size_t c = 0; c < st.rules.size(); ++c)
            dh.col(enc.column(st.rules[c].node)) += din.col(static_cast<Eigen::Index>(c)).tail(hd);

        encoder_backward(net, enc, std::move(dh), *grad);
    }
    return out;
}

std::string to_string(PickMode mode) { return mode == PickMode::Greedy ? "greedy" : "sample"; }

PickMode parse_pick_mode(const std::string &name) {
    if (name == "greedy") return PickMode::Greedy;
    if (name == "sample") return PickMode::Sample;
    throw std::invalid_argument("unknown pick mode: " + name);
}

RewriteAction policy_action(const PolicyNet &net, const ScheduleDag &dag, const SearchConfig &config, PickMode mode,
                            double p_c, Rng &rng, PolicyStep *record) {
    const auto regions = subsample(candidate_regions(dag), config.region_candidates, rng);
    if (regions.empty()) throw std::logic_error("policy_action: no movable task");
    auto enc_ptr = std::make_shared<const Encoding>(encode(net, dag));
    const Encoding &enc = *enc_ptr;
    const VectorXd q = region_scores(net, enc, regions);
    Eigen::Index ri = argmax(q);
    if (mode == PickMode::Sample && !rng.bernoulli(p_c)) ri = draw(softmax(q), rng);
    const int region = regions[static_cast<std::size_t>(ri)];

    // Site roots are always offered; task parents fill the remaining budget.
    std::vector<Rule> roots, parents;
    for (const auto &r : effective_rules(dag, region)) (r.is_root() ? roots : parents).push_back(r);
    auto rules = std::move(roots);
    const int room = std::max(0, config.rule_candidates - static_cast<int>(rules.size()));
    for (const auto &r : subsample(parents, room, rng)) rules.push_back(r);
    if (rules.empty()) rules.push_back(Rule::root(dag.site_of(region)));

    const VectorXd z = rule_logits(net, enc, region, rules);
    const Eigen::Index ui = mode == PickMode::Greedy ? argmax(z) : draw(softmax(z), rng);

    if (record) {
        record->state = dag;
        record->regions = regions;
        record->region_index = static_cast<int>(ri);
        record->rules = rules;
        record->rule_index = static_cast<int>(ui);
        record->reward = 0.0;
        record->encoding = std::move(enc_ptr);
    }
    return RewriteAction{region, rules[static_cast<std::size_t>(ui)]};
}

PolicyPicker::PolicyPicker(const PolicyNet &net, SearchConfig config, PickMode mode)
    : net_(net), config_(config), mode_(mode) {}

RewriteAction PolicyPicker::pick(const ScheduleDag &dag, Rng &rng) {
    return policy_action(net_, dag, config_, mode_, config_.pc_min, rng);
}

Adam::Adam(Eigen::Index size, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(VectorXd::Zero(size)), v_(VectorXd::Zero(size)) {}

void Adam::step(VectorXd &params, const VectorXd &grad, double lr) {
    if (grad.size() != params.size() || grad.size() != m_.size()) throw std::invalid_argument("Adam: size mismatch");
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

// ---------------------------------------------------------------- checkpoints

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const PolicyNet &net, const std::string &path) {
    using nlohmann::json;
    const auto &d = net.dims();
    json layers = json::array();
    json tensors = json::array();
    for (const auto &t : net.layout()) {
        layers.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
        json data = json::array();
        for (Eigen::Index k = 0; k < t.size(); ++k) data.push_back(net.params()(t.offset + k));
        tensors.push_back({{"name", t.name}, {"data", std::move(data)}});
    }
    json j{{"header",
            {{"version", kCheckpointVersion},
             {"hidden", d.hidden},
             {"d_in", d.input_size()},
             {"sites", d.num_sites},
             {"filters", d.num_filters},
             {"e_max", d.e_max},
             {"distributed", d.distributed},
             {"train_step", net.train_step},
             {"layers", std::move(layers)}}},
           {"tensors", std::move(tensors)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint: " + path);
    out << j.dump() << '\n';
    if (!out) throw CheckpointError("failed writing checkpoint: " + path);
}

PolicyNet load_checkpoint(const std::string &path) {
    using nlohmann::json;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
        const auto &h = j.at("header");
        if (h.at("version").get<int>() != kCheckpointVersion)
            throw CheckpointError("unsupported checkpoint version " + h.at("version").dump());
        PolicyDims d;
        d.hidden = h.at("hidden").get<int>();
        d.num_sites = h.at("sites").get<int>();
        d.num_filters = h.at("filters").get<int>();
        d.e_max = h.at("e_max").get<int>();
        d.distributed = h.at("distributed").get<bool>();
        if (h.at("d_in").get<int>() != d.input_size()) throw CheckpointError("checkpoint d_in inconsistent with header");
        PolicyNet net(d, 0);
        net.train_step = h.at("train_step").get<long>();
        const auto &tensors = j.at("tensors");
        if (tensors.size() != net.layout().size()) throw CheckpointError("checkpoint tensor count mismatch");
        for (std::size_t k = 0; k < net.layout().size(); ++k) {
            const auto &info = net.layout()[k];
            const auto &layer = h.at("layers").at(k);
            if (layer.at("name").get<std::string>() != info.name || layer.at("rows").get<int>() != info.rows ||
                layer.at("cols").get<int>() != info.cols)
                throw CheckpointError("checkpoint shape mismatch at tensor " + info.name);
            const auto &data = tensors[k].at("data");
            if (tensors[k].at("name").get<std::string>() != info.name ||
                static_cast<Eigen::Index>(data.size()) != info.size())
                throw CheckpointError("checkpoint data size mismatch at tensor " + info.name);
            for (Eigen::Index e = 0; e < info.size(); ++e)
                net.params()(info.offset + e) = data[static_cast<std::size_t>(e)].get<double>();
        }
        return net;
    } catch (const json::exception &e) {
        throw CheckpointError("malformed checkpoint " + path + ": " + e.what());
    }
}

PolicyNet load_checkpoint(const std::string &path, const PolicyDims &expected) {
    PolicyNet net = load_checkpoint(path);
    const auto &d = net.dims();
    if (!(d == expected))
        throw CheckpointError("checkpoint shape mismatch: hidden " + std::to_string(d.hidden) + " vs " +
                              std::to_string(expected.hidden) + ", d_in " + std::to_string(d.input_size()) + " vs " +
                              std::to_string(expected.input_size()));
    return net;
}

} // namespace roars
