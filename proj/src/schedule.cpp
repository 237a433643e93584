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

#include "roars/schedule.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace roars {

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::Visibility: return "visibility";
    case ViolationKind::Resource: return "resource";
    case ViolationKind::Deadline: return "deadline";
    case ViolationKind::Arrival: return "arrival";
    case ViolationKind::Sibling: return "sibling";
    case ViolationKind::UnknownTask: return "unknown-task";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::Edge: return "edge";
    case ViolationKind::Orphan: return "orphan";
    }
    return "?";
}

namespace {

std::string describe(const Violation &v) {
    std::ostringstream os;
    os << "infeasible assignment: " << to_string(v.kind) << " (task " << v.task_id << ", site " << v.site
       << ", step " << v.step << ")";
    if (!v.message.empty()) os << ": " << v.message;
    return os.str();
}

std::string list_ids(const std::vector<int> &ids) {
    std::ostringstream os;
    os << "unassigned tasks:";
    for (int id : ids) os << ' ' << id;
    return os.str();
}

} // namespace

InfeasibleAssignment::InfeasibleAssignment(Violation v) : std::runtime_error(describe(v)), violation_(std::move(v)) {}

UnassignedTasks::UnassignedTasks(std::vector<int> ids) : std::runtime_error(list_ids(ids)), ids_(std::move(ids)) {}

ScheduleDag::ScheduleDag(std::shared_ptr<const Instance> inst, int floor) : inst_(std::move(inst)), floor_(floor) {
    const auto n = static_cast<std::size_t>(inst_->num_tasks());
    site_.assign(n, -1);
    start_.assign(n, -1);
    pinned_.assign(n, 0);
    occupancy_.assign(static_cast<std::size_t>(inst_->num_sites) * inst_->num_filters * inst_->horizon, -1);
    rebuild_edges();
}

ScheduleDag ScheduleDag::build(std::shared_ptr<const Instance> inst, std::span<const Assignment> assignments,
                               int floor) {
    ScheduleDag dag(std::move(inst), 0);
    const int n = dag.inst_->num_tasks();
    for (const auto &a : assignments) {
        if (a.task_id < 0 || a.task_id >= n || dag.scheduled(a.task_id))
            throw InfeasibleAssignment({ViolationKind::UnknownTask, a.task_id, a.site, a.start, "unknown or duplicate task"});
        if (a.site < 0 || a.site >= dag.num_sites())
            throw InfeasibleAssignment({ViolationKind::UnknownTask, a.task_id, a.site, a.start, "unknown site"});
    }
    // Place in start order so sibling checks see the earlier sibling first.
    std::vector<Assignment> sorted(assignments.begin(), assignments.end());
    std::sort(sorted.begin(), sorted.end(), [](const Assignment &x, const Assignment &y) {
        return x.start != y.start ? x.start < y.start : x.task_id < y.task_id;
    });
    for (const auto &a : sorted) {
        if (auto v = dag.first_conflict(a.task_id, a.site, a.start, true)) throw InfeasibleAssignment(*v);
        dag.place(a.task_id, a.site, a.start);
    }
    dag.floor_ = floor;
    dag.rebuild_edges();
    return dag;
}

ScheduleDag ScheduleDag::from_parts(std::shared_ptr<const Instance> inst, std::span<const Assignment> assignments,
                                    std::vector<Edge> edges) {
    ScheduleDag dag(std::move(inst), 0);
    for (const auto &a : assignments) {
        const auto k = static_cast<std::size_t>(a.task_id);
        dag.site_[k] = a.site;
        dag.start_[k] = a.start;
        dag.scheduled_.push_back(a.task_id);
        const auto &info = dag.inst_->tasks[k];
        for (int f = 0; f < dag.inst_->num_filters; ++f)
            if (info.filter_mask & (1u << f))
                for (int t = std::max(0, a.start); t < std::min(a.start + info.exposure, dag.inst_->horizon); ++t)
                    dag.occ(a.site, f, t) = a.task_id;
    }
    std::sort(dag.scheduled_.begin(), dag.scheduled_.end());
    dag.edges_ = std::move(edges);
    return dag;
}

std::vector<Assignment> ScheduleDag::assignments() const {
    std::vector<Assignment> out;
    out.reserve(scheduled_.size());
    for (int t : scheduled_) out.push_back({t, site_of(t), start_of(t)});
    return out;
}

std::vector<int> ScheduleDag::parents(int node) const {
    std::vector<int> out;
    for (const auto &e : edges_)
        if (e.to == node) out.push_back(e.from);
    return out;
}

std::vector<int> ScheduleDag::topological_order() const {
    std::vector<int> order = scheduled_;
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return start_of(a) != start_of(b) ? start_of(a) < start_of(b) : a < b;
    });
    return order;
}

double ScheduleDag::slowdown(int task) const {
    const auto &info = inst_->tasks[static_cast<std::size_t>(task)];
    return static_cast<double>(start_of(task) + info.exposure - info.arrival) / info.exposure;
}

double ScheduleDag::total_slowdown() const {
    double sum = 0.0;
    for (int t : scheduled_) sum += slowdown(t);
    return sum;
}

double ScheduleDag::mean_slowdown() const { return scheduled_.empty() ? 0.0 : total_slowdown() / size(); }

int ScheduleDag::scheduled_prev_sibling(int task) const {
    int p = inst_->tasks[static_cast<std::size_t>(task)].prev_sibling;
    while (p >= 0 && !scheduled(p)) p = inst_->tasks[static_cast<std::size_t>(p)].prev_sibling;
    return p;
}

int ScheduleDag::scheduled_next_sibling(int task) const {
    int q = inst_->tasks[static_cast<std::size_t>(task)].next_sibling;
    while (q >= 0 && !scheduled(q)) q = inst_->tasks[static_cast<std::size_t>(q)].next_sibling;
    return q;
}

int ScheduleDag::release(int task) const {
    const auto &info = inst_->tasks[static_cast<std::size_t>(task)];
    int lb = std::max(info.arrival, floor_);
    const int p = scheduled_prev_sibling(task);
    if (p >= 0 && p != task) lb = std::max(lb, completion_of(p) + info.gap);
    return lb;
}

std::optional<Violation> ScheduleDag::first_conflict(int task, int site, int start, bool respect_successor) const {
    const auto &info = inst_->tasks[static_cast<std::size_t>(task)];
    if (start < info.arrival) return Violation{ViolationKind::Arrival, task, site, start, "start before required time"};
    if (start + info.exposure > info.deadline)
        return Violation{ViolationKind::Deadline, task, site, start, "completion after deadline"};
    if (!inst_->visibility.observable(info.target, site, start, info.exposure))
        return Violation{ViolationKind::Visibility, task, site, start, "target not observable for the whole exposure"};
    for (int f = 0; f < inst_->num_filters; ++f) {
        if (!(info.filter_mask & (1u << f))) continue;
        for (int t = start; t < start + info.exposure; ++t) {
            const int o = occupant(site, f, t);
            if (o >= 0 && o != task)
                return Violation{ViolationKind::Resource, task, site, t,
                                 "filter " + std::to_string(f) + " held by task " + std::to_string(o)};
        }
    }
    const int p = scheduled_prev_sibling(task);
    if (p >= 0 && start < completion_of(p) + info.gap)
        return Violation{ViolationKind::Sibling, task, site, start, "too close to previous exposure of the target"};
    if (respect_successor) {
        const int q = scheduled_next_sibling(task);
        if (q >= 0 && start + info.exposure + info.gap > start_of(q))
            return Violation{ViolationKind::Sibling, task, site, start, "too close to next exposure of the target"};
    }
    return std::nullopt;
}

bool ScheduleDag::fits(int task, int site, int start, bool respect_successor) const {
    if (start < floor_) return false;
    const auto &info = inst_->tasks[static_cast<std::size_t>(task)];
    if (start < info.arrival || start + info.exposure > info.deadline) return false;
    if (!inst_->visibility.observable(info.target, site, start, info.exposure)) return false;
    const int p = scheduled_prev_sibling(task);
    if (p >= 0 && start < completion_of(p) + info.gap) return false;
    if (respect_successor) {
        const int q = scheduled_next_sibling(task);
        if (q >= 0 && start + info.exposure + info.gap > start_of(q)) return false;
    }
    for (int f = 0; f < inst_->num_filters; ++f) {
        if (!(info.filter_mask & (1u << f))) continue;
        for (int t = start; t < start + info.exposure; ++t) {
            const int o = occupant(site, f, t);
            if (o >= 0 && o != task) return false;
        }
    }
    return true;
}

std::optional<int> ScheduleDag::earliest_start(int task, int site, int lower_bound, bool respect_successor) const {
    const auto &info = inst_->tasks[static_cast<std::size_t>(task)];
    const auto &vis = inst_->visibility;
    const int e = info.exposure;
    int t = std::max(lower_bound, release(task));
    int last = info.deadline - e;
    if (respect_successor) {
        const int q = scheduled_next_sibling(task);
        if (q >= 0) last = std::min(last, start_of(q) - info.gap - e);
    }
    while (t <= last) {
        const int run = vis.run_end_at(info.target, site, t);
        if (run < t + e) {
            t = run + 1;
            continue;
        }
        // latest blocking step inside [t, t+e), if any
        int blocked_at = t - 1;
        for (int f = 0; f < inst_->num_filters; ++f) {
            if (!(info.filter_mask & (1u << f))) continue;
            for (int s = t + e - 1; s > blocked_at; --s) {
                const int o = occupant(site, f, s);
                if (o >= 0 && o != task) {
                    blocked_at = s;
                    break;
                }
            }
        }
        if (blocked_at < t) return t;
        t = blocked_at + 1;
    }
    return std::nullopt;
}

void ScheduleDag::place(int task, int site, int start) {
    const auto k = static_cast<std::size_t>(task);
    const auto &info = inst_->tasks[k];
    if (scheduled(task)) remove(task);
    site_[k] = site;
    start_[k] = start;
    for (int f = 0; f < inst_->num_filters; ++f)
        if (info.filter_mask & (1u << f))
            for (int t = start; t < start + info.exposure; ++t) occ(site, f, t) = task;
    scheduled_.insert(std::lower_bound(scheduled_.begin(), scheduled_.end(), task), task);
}

void ScheduleDag::remove(int task) {
    const auto k = static_cast<std::size_t>(task);
    if (!scheduled(task)) return;
    const auto &info = inst_->tasks[k];
    for (int f = 0; f < inst_->num_filters; ++f)
        if (info.filter_mask & (1u << f))
            for (int t = start_[k]; t < start_[k] + info.exposure; ++t)
                if (occ(site_[k], f, t) == task) occ(site_[k], f, t) = -1;
    site_[k] = -1;
    start_[k] = -1;
    scheduled_.erase(std::lower_bound(scheduled_.begin(), scheduled_.end(), task));
}

void ScheduleDag::rebuild_edges() { edges_ = derive_edges(*this); }

std::vector<Edge> derive_edges(const ScheduleDag &dag) {
    const auto &inst = dag.instance();
    std::map<std::pair<int, int>, std::vector<int>> finishing; // (site, completion) -> tasks ascending
    for (int t : dag.tasks()) finishing[{dag.site_of(t), dag.completion_of(t)}].push_back(t);
    std::vector<Edge> edges;
    for (int t : dag.topological_order()) {
        const int site = dag.site_of(t);
        auto it = finishing.find({site, dag.start_of(t)});
        const bool has_task_parent = it != finishing.end();
        if (dag.start_of(t) == inst.tasks[static_cast<std::size_t>(t)].arrival || !has_task_parent)
            edges.push_back({root_node(site), t});
        if (has_task_parent)
            for (int p : it->second) edges.push_back({p, t});
    }
    return edges;
}

std::vector<Violation> validate(const ScheduleDag &dag) {
    std::vector<Violation> out;
    const auto &inst = dag.instance();
    const int n = inst.num_tasks();
    const auto assignments = dag.assignments();

    std::vector<int> usage(static_cast<std::size_t>(inst.num_sites) * inst.num_filters * inst.horizon, 0);
    for (const auto &a : assignments) {
        if (a.task_id < 0 || a.task_id >= n || a.site < 0 || a.site >= inst.num_sites) {
            out.push_back({ViolationKind::UnknownTask, a.task_id, a.site, a.start, "unknown task or site"});
            continue;
        }
        const auto &info = inst.tasks[static_cast<std::size_t>(a.task_id)];
        if (a.start < info.arrival) out.push_back({ViolationKind::Arrival, a.task_id, a.site, a.start, "B < A"});
        if (a.start + info.exposure > info.deadline)
            out.push_back({ViolationKind::Deadline, a.task_id, a.site, a.start, "C > deadline"});
        if (!inst.visibility.observable(info.target, a.site, a.start, info.exposure))
            out.push_back({ViolationKind::Visibility, a.task_id, a.site, a.start, "not observable"});
        for (int f = 0; f < inst.num_filters; ++f)
            if (info.filter_mask & (1u << f))
                for (int t = std::max(0, a.start); t < std::min(a.start + info.exposure, inst.horizon); ++t)
                    if (++usage[(static_cast<std::size_t>(a.site) * inst.num_filters + f) * inst.horizon + t] == 2)
                        out.push_back({ViolationKind::Resource, a.task_id, a.site, t,
                                       "filter " + std::to_string(f) + " over capacity"});
        // nearest scheduled earlier sibling
        int p = info.prev_sibling;
        while (p >= 0 && !dag.scheduled(p)) p = inst.tasks[static_cast<std::size_t>(p)].prev_sibling;
        if (p >= 0 && a.start < dag.completion_of(p) + info.gap)
            out.push_back({ViolationKind::Sibling, a.task_id, a.site, a.start, "cadence gap to task " + std::to_string(p)});
    }

    // Acyclicity of the stored edges (Kahn).
    std::map<int, int> indeg;
    std::map<int, std::vector<int>> children;
    for (int t : dag.tasks()) indeg[t] = 0;
    for (int s = 0; s < inst.num_sites; ++s) indeg[root_node(s)] = 0;
    for (const auto &e : dag.edges()) {
        ++indeg[e.to];
        indeg.try_emplace(e.from, 0);
        children[e.from].push_back(e.to);
    }
    std::vector<int> ready;
    for (const auto &[node, d] : indeg)
        if (d == 0) ready.push_back(node);
    std::size_t seen = 0;
    auto remaining = indeg;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++seen;
        for (int c : children[v])
            if (--remaining[c] == 0) ready.push_back(c);
    }
    if (seen != indeg.size()) out.push_back({ViolationKind::Cycle, -1, -1, -1, "dependency graph has a cycle"});

    for (int t : dag.tasks())
        if (indeg[t] == 0) out.push_back({ViolationKind::Orphan, t, dag.site_of(t), dag.start_of(t), "no incoming edge"});

    auto expected = derive_edges(dag);
    auto actual = dag.edges();
    auto key = [](const Edge &a, const Edge &b) { return a.to != b.to ? a.to < b.to : a.from < b.from; };
    std::sort(expected.begin(), expected.end(), key);
    std::sort(actual.begin(), actual.end(), key);
    if (expected != actual) {
        std::vector<Edge> diff;
        std::set_symmetric_difference(expected.begin(), expected.end(), actual.begin(), actual.end(),
                                      std::back_inserter(diff), key);
        for (const auto &e : diff)
            out.push_back({ViolationKind::Edge, e.to, -1, -1,
                           "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " disagrees with the edge rules"});
    }
    return out;
}

double average_slowdown(const ScheduleDag &dag) {
    std::vector<int> missing;
    for (int t = 0; t < dag.instance().num_tasks(); ++t)
        if (!dag.scheduled(t)) missing.push_back(t);
    if (!missing.empty()) throw UnassignedTasks(std::move(missing));
    return dag.mean_slowdown();
}

double immediate_cost(const ScheduleDag &before, const ScheduleDag &after) {
    if (before.tasks() != after.tasks()) throw std::invalid_argument("immediate_cost: schedules cover different task sets");
    return before.total_slowdown() - after.total_slowdown();
}

int embedding_length(int num_sites, int num_filters, int e_max, bool distributed) {
    const int block = distributed ? num_sites * num_filters : num_filters;
    return block * (e_max + 1) + 1;
}

void embed_into(const ScheduleDag &dag, int task, bool distributed, int e_max, std::span<double> out) {
    const auto &inst = dag.instance();
    const auto &info = inst.tasks[static_cast<std::size_t>(task)];
    const int d = inst.num_filters;
    const int n_sites = inst.num_sites;
    if (info.exposure > e_max) throw std::invalid_argument("task exposure exceeds e_max");
    const int block = distributed ? n_sites * d : d;
    if (static_cast<int>(out.size()) != block * (e_max + 1) + 1) throw std::invalid_argument("embedding buffer size");
    std::fill(out.begin(), out.end(), 0.0);
    const int site = dag.site_of(task);
    const int base = distributed ? site * d : 0;
    for (int f = 0; f < d; ++f) out[static_cast<std::size_t>(base + f)] = (info.filter_mask >> f) & 1u;
    const int b = dag.start_of(task);
    for (int k = 0; k < info.exposure; ++k) {
        const auto offset = static_cast<std::size_t>(block * (k + 1));
        if (distributed) {
            for (int s = 0; s < n_sites; ++s)
                for (int f = 0; f < d; ++f)
                    out[offset + static_cast<std::size_t>(s * d + f)] = dag.occupant(s, f, b + k) >= 0 ? 1.0 : 0.0;
        } else {
            for (int f = 0; f < d; ++f)
                out[offset + static_cast<std::size_t>(f)] = dag.occupant(site, f, b + k) >= 0 ? 1.0 : 0.0;
        }
    }
    out.back() = dag.slowdown(task);
}

std::vector<double> embed(const ScheduleDag &dag, int task, bool distributed, int e_max) {
    std::vector<double> v(static_cast<std::size_t>(
        embedding_length(dag.num_sites(), dag.instance().num_filters, e_max, distributed)));
    embed_into(dag, task, distributed, e_max, v);
    return v;
}

std::string schedule_dump(const ScheduleDag &dag) {
    std::string out;
    for (int t : dag.tasks()) {
        nlohmann::json j{{"task_id", t}, {"site", dag.site_of(t)}, {"start", dag.start_of(t)}, {"slowdown", dag.slowdown(t)}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

} // namespace roars
