#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wfsched {

/// Dense index of a task inside a WorkflowDag. Indices follow ascending task id
/// order, so "smallest index" and "smallest id" tie-breaks coincide.
using TaskIndex = std::size_t;

struct Task {
    std::string id;
    double weight_mi = 0.0;  // millions of instructions
};

struct Edge {
    std::string from;
    std::string to;
    double data_mb = 0.0;
};

/// Adjacency entry: the task on the other end plus the transferred data size.
struct Arc {
    TaskIndex task;
    double data_mb;
};

/// Raised by structural queries (levels, topological order, ...) on DAGs that
/// fail validation.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Workflow DAG. Construction never throws on malformed graphs so that
/// validate_dag can report every problem; structural queries do throw.
class WorkflowDag {
public:
    WorkflowDag() = default;
    WorkflowDag(std::vector<Task> tasks, std::vector<Edge> edges);

    std::size_t size() const { return tasks_.size(); }
    bool empty() const { return tasks_.empty(); }

    const Task& task(TaskIndex i) const { return tasks_[i]; }
    const std::vector<Task>& tasks() const { return tasks_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<TaskIndex> find(std::string_view id) const;
    TaskIndex index_of(std::string_view id) const;

    std::span<const Arc> children(TaskIndex i) const { return children_[i]; }
    std::span<const Arc> parents(TaskIndex i) const { return parents_[i]; }

    bool is_entry(TaskIndex i) const { return parents_[i].empty(); }
    bool is_exit(TaskIndex i) const { return children_[i].empty(); }
    std::vector<TaskIndex> entries() const;
    std::vector<TaskIndex> exits() const;

    /// Data size on the edge from -> to; throws if there is no such edge.
    double data_mb(TaskIndex from, TaskIndex to) const;

    /// Kahn order, ties by smallest index. Throws StructuralError on cycles.
    const std::vector<TaskIndex>& topological_order() const;

private:
    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, TaskIndex> index_;
    std::vector<std::vector<Arc>> children_;
    std::vector<std::vector<Arc>> parents_;
    std::vector<TaskIndex> topo_;
    bool acyclic_ = false;
};

enum class ViolationKind {
    Cycle,
    DanglingEdge,
    SelfEdge,
    DuplicateEdge,
    DuplicateTask,
    NonPositiveWeight,
    NegativeData,
    NoEntry,
    NoExit,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

std::vector<Violation> validate_dag(const WorkflowDag& dag);

/// Throws StructuralError listing every violation, if any.
void require_valid(const WorkflowDag& dag);

/// LN(t): 1 for entry tasks, otherwise 1 + max parent level.
std::vector<int> level_numbers(const WorkflowDag& dag);

struct WidthProfile {
    std::vector<std::size_t> per_level;
    std::size_t max_width = 0;
    double avg_width = 0.0;
    double stddev_width = 0.0;  // population form
};

WidthProfile width_profile(std::span<const std::size_t> per_level);
WidthProfile width_profile(const WorkflowDag& dag);

/// Longest entry-to-exit path where each task weighs weight_mi / mips and each
/// traversed edge weighs data_mb / bandwidth. Ties prefer the lexicographically
/// smallest sequence of task indices.
std::vector<TaskIndex> critical_path(const WorkflowDag& dag, double mips, double bandwidth_mbps);

struct Pipeline {
    TaskIndex head;
    std::vector<TaskIndex> body;  // head first
    double length_mi = 0.0;
    TaskIndex source;
    TaskIndex sink;
};

struct PipelineGroup {
    TaskIndex source;
    TaskIndex sink;
    std::vector<Pipeline> pipelines;
    double longest_mi = 0.0;
    /// Indices into `pipelines`; the first subgroup holds only the longest one.
    std::vector<std::vector<std::size_t>> subgroups;
};

/// Groups of at least two parallel pipelines sharing a distribution task and an
/// aggregation task. Subgroups are packed first-fit-decreasing under capacity
/// longest_mi.
std::vector<PipelineGroup> detect_pipelines(const WorkflowDag& dag);

}  // namespace wfsched
