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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roars/instance.hpp"

namespace roars {

struct Assignment {
    int task_id = 0;
    int site = 0;
    int start = 0; // B_j

    bool operator==(const Assignment &) const = default;
};

enum class ViolationKind { Visibility, Resource, Deadline, Arrival, Sibling, UnknownTask, Cycle, Edge, Orphan };

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    int task_id = -1;
    int site = -1;
    int step = -1;
    std::string message;
};

class InfeasibleAssignment : public std::runtime_error {
  public:
    explicit InfeasibleAssignment(Violation v);
    const Violation &violation() const { return violation_; }

  private:
    Violation violation_;
};

class UnassignedTasks : public std::runtime_error {
  public:
    explicit UnassignedTasks(std::vector<int> ids);
    const std::vector<int> &task_ids() const { return ids_; }

  private:
    std::vector<int> ids_;
};

/// Node ids in the dependency graph: tasks are their task id (>= 0), the
/// root of site s is -1 - s.
inline constexpr int root_node(int site) { return -1 - site; }
inline constexpr bool is_root(int node) { return node < 0; }
inline constexpr int root_site(int node) { return -1 - node; }

struct Edge {
    int from = 0;
    int to = 0;
    bool operator==(const Edge &) const = default;
};

/// A (partial) schedule over an Instance, viewed as the dependency DAG:
/// one root per site, an edge root_s -> j when task j starts at its
/// required time on site s, and an edge j' -> j when j starts exactly when
/// j' completes on the same site. A task whose start is forced by something
/// other than arrival or a predecessor (a visibility opening, a cadence gap,
/// the online time floor) hangs off its site root.
///
/// Value type. Occupancy is kept per (site, filter, step) with capacity 1.
/// Tasks are movable when scheduled, not pinned, and starting at or after
/// the time floor; everything else is frozen.
class ScheduleDag {
  public:
    ScheduleDag() = default;
    explicit ScheduleDag(std::shared_ptr<const Instance> inst, int floor = 0);

    /// Checks every assignment against arrival, deadline, visibility,
    /// capacity and cadence-sibling constraints (in that order) and throws
    /// InfeasibleAssignment on the first violation.
    static ScheduleDag build(std::shared_ptr<const Instance> inst, std::span<const Assignment> assignments,
                             int floor = 0);

    /// Unchecked construction with caller-supplied edges, for validation.
    static ScheduleDag from_parts(std::shared_ptr<const Instance> inst, std::span<const Assignment> assignments,
                                  std::vector<Edge> edges);

    const Instance &instance() const { return *inst_; }
    const std::shared_ptr<const Instance> &instance_ptr() const { return inst_; }
    int num_sites() const { return inst_->num_sites; }
    int floor() const { return floor_; }

    bool scheduled(int task) const { return start_[static_cast<std::size_t>(task)] >= 0; }
    int site_of(int task) const { return site_[static_cast<std::size_t>(task)]; }
    int start_of(int task) const { return start_[static_cast<std::size_t>(task)]; }
    int completion_of(int task) const { return start_of(task) + inst_->tasks[static_cast<std::size_t>(task)].exposure; }
    bool pinned(int task) const { return pinned_[static_cast<std::size_t>(task)] != 0; }
    bool movable(int task) const { return scheduled(task) && !pinned(task) && start_of(task) >= floor_; }

    /// Scheduled task ids, ascending.
    const std::vector<int> &tasks() const { return scheduled_; }
    int size() const { return static_cast<int>(scheduled_.size()); }
    std::vector<Assignment> assignments() const;

    /// Occupant task of (site, filter, step), or -1.
    int occupant(int site, int filter, int step) const {
        return occupancy_[(static_cast<std::size_t>(site) * inst_->num_filters + filter) * inst_->horizon + step];
    }

    const std::vector<Edge> &edges() const { return edges_; }
    /// Parents of a node in edge order (roots first, then tasks by id).
    std::vector<int> parents(int node) const;
    /// Scheduled tasks sorted by (start, id): a topological order.
    std::vector<int> topological_order() const;

    double slowdown(int task) const;
    double total_slowdown() const;
    /// Mean over scheduled tasks; 0 for an empty schedule.
    double mean_slowdown() const;

    // ---- low-level mutation used by the schedulers and the rewriter ----

    /// Would `task` fit at (site, start) given everything else placed?
    /// `respect_successor` also enforces the gap to a later scheduled sibling.
    bool fits(int task, int site, int start, bool respect_successor = true) const;
    std::optional<Violation> first_conflict(int task, int site, int start, bool respect_successor = true) const;
    std::optional<int> earliest_start(int task, int site, int lower_bound, bool respect_successor = true) const;
    /// Lower bound on the start implied by arrival, floor and the nearest
    /// scheduled predecessor sibling.
    int release(int task) const;
    void place(int task, int site, int start);
    void remove(int task);
    void pin(int task, bool value = true) { pinned_[static_cast<std::size_t>(task)] = value; }
    void set_floor(int floor) { floor_ = floor; }
    /// Nearest scheduled sibling before / after `task`, or -1.
    int scheduled_prev_sibling(int task) const;
    int scheduled_next_sibling(int task) const;
    /// Re-derives the edge set from the current assignments.
    void rebuild_edges();

  private:
    int &occ(int site, int filter, int step) {
        return occupancy_[(static_cast<std::size_t>(site) * inst_->num_filters + filter) * inst_->horizon + step];
    }

    std::shared_ptr<const Instance> inst_;
    int floor_ = 0;
    std::vector<int> site_;
    std::vector<int> start_;
    std::vector<std::uint8_t> pinned_;
    std::vector<int> occupancy_;
    std::vector<int> scheduled_;
    std::vector<Edge> edges_;
};

/// Expected edge set of the assignments in `dag`, derived from scratch.
std::vector<Edge> derive_edges(const ScheduleDag &dag);

/// Re-derives every invariant; empty iff the schedule is feasible and the
/// stored edges are exactly the derived ones.
std::vector<Violation> validate(const ScheduleDag &dag);

/// Mean slowdown over all instance tasks; throws UnassignedTasks if any
/// task is not scheduled.
double average_slowdown(const ScheduleDag &dag);

/// c(before) - c(after) with c the total slowdown; positive is an
/// improvement. Throws std::invalid_argument when the task sets differ.
double immediate_cost(const ScheduleDag &before, const ScheduleDag &after);

/// Length of the task embedding for (sites, filters, e_max).
int embedding_length(int num_sites, int num_filters, int e_max, bool distributed);

/// Task embedding: requirement block, per-step utilization snapshots over
/// the task's execution, zero padding up to e_max steps, final slowdown.
std::vector<double> embed(const ScheduleDag &dag, int task, bool distributed, int e_max);
void embed_into(const ScheduleDag &dag, int task, bool distributed, int e_max, std::span<double> out);

/// JSON lines, one {task_id, site, start, slowdown} per scheduled task.
std::string schedule_dump(const ScheduleDag &dag);

} // namespace roars
