#include "wfsched/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace wfsched {

WorkflowDag::WorkflowDag(std::vector<Task> tasks, std::vector<Edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)) {
    std::stable_sort(tasks_.begin(), tasks_.end(),
                     [](const Task& a, const Task& b) { return a.id < b.id; });
    for (TaskIndex i = 0; i < tasks_.size(); ++i) {
        index_.emplace(tasks_[i].id, i);  // duplicates keep the first entry
    }

    children_.resize(tasks_.size());
    parents_.resize(tasks_.size());
    std::set<std::pair<TaskIndex, TaskIndex>> seen;
    for (const auto& e : edges_) {
        auto from = find(e.from);
        auto to = find(e.to);
        if (!from || !to || *from == *to) continue;
        if (!seen.emplace(*from, *to).second) continue;
        children_[*from].push_back({*to, e.data_mb});
        parents_[*to].push_back({*from, e.data_mb});
    }
    auto by_task = [](const Arc& a, const Arc& b) { return a.task < b.task; };
    for (auto& c : children_) std::sort(c.begin(), c.end(), by_task);
    for (auto& p : parents_) std::sort(p.begin(), p.end(), by_task);

    // Kahn with a min-heap so the order is canonical.
    std::vector<std::size_t> indegree(tasks_.size());
    for (TaskIndex i = 0; i < tasks_.size(); ++i) indegree[i] = parents_[i].size();
    std::priority_queue<TaskIndex, std::vector<TaskIndex>, std::greater<>> ready;
    for (TaskIndex i = 0; i < tasks_.size(); ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    topo_.reserve(tasks_.size());
    while (!ready.empty()) {
        TaskIndex t = ready.top();
        ready.pop();
        topo_.push_back(t);
        for (const auto& c : children_[t]) {
            if (--indegree[c.task] == 0) ready.push(c.task);
        }
    }
    acyclic_ = topo_.size() == tasks_.size();
}

std::optional<TaskIndex> WorkflowDag::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TaskIndex WorkflowDag::index_of(std::string_view id) const {
    auto i = find(id);
    if (!i) throw StructuralError("unknown task id '" + std::string(id) + "'");
    return *i;
}

std::vector<TaskIndex> WorkflowDag::entries() const {
    std::vector<TaskIndex> out;
    for (TaskIndex i = 0; i < size(); ++i) {
        if (is_entry(i)) out.push_back(i);
    }
    return out;
}

std::vector<TaskIndex> WorkflowDag::exits() const {
    std::vector<TaskIndex> out;
    for (TaskIndex i = 0; i < size(); ++i) {
        if (is_exit(i)) out.push_back(i);
    }
    return out;
}

double WorkflowDag::data_mb(TaskIndex from, TaskIndex to) const {
    for (const auto& c : children_[from]) {
        if (c.task == to) return c.data_mb;
    }
    throw StructuralError("no edge " + tasks_[from].id + " -> " + tasks_[to].id);
}

const std::vector<TaskIndex>& WorkflowDag::topological_order() const {
    if (!acyclic_) throw StructuralError("workflow contains a cycle");
    return topo_;
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Cycle: return "cycle";
        case ViolationKind::DanglingEdge: return "dangling-edge";
        case ViolationKind::SelfEdge: return "self-edge";
        case ViolationKind::DuplicateEdge: return "duplicate-edge";
        case ViolationKind::DuplicateTask: return "duplicate-task";
        case ViolationKind::NonPositiveWeight: return "zero-weight-task";
        case ViolationKind::NegativeData: return "negative-data";
        case ViolationKind::NoEntry: return "no-entry-task";
        case ViolationKind::NoExit: return "no-exit-task";
    }
    return "unknown";
}

std::vector<Violation> validate_dag(const WorkflowDag& dag) {
    std::vector<Violation> out;
    const auto& tasks = dag.tasks();

    for (std::size_t i = 1; i < tasks.size(); ++i) {
        if (tasks[i].id == tasks[i - 1].id) {
            out.push_back({ViolationKind::DuplicateTask, tasks[i].id});
        }
    }
    for (const auto& t : tasks) {
        if (!(t.weight_mi > 0.0) || !std::isfinite(t.weight_mi)) {
            out.push_back({ViolationKind::NonPositiveWeight, t.id});
        }
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : dag.edges()) {
        const std::string label = e.from + " -> " + e.to;
        if (!dag.find(e.from) || !dag.find(e.to)) {
            out.push_back({ViolationKind::DanglingEdge, label});
            continue;
        }
        if (e.from == e.to) {
            out.push_back({ViolationKind::SelfEdge, label});
            continue;
        }
        if (!seen.emplace(e.from, e.to).second) {
            out.push_back({ViolationKind::DuplicateEdge, label});
        }
        if (!(e.data_mb >= 0.0)) out.push_back({ViolationKind::NegativeData, label});
    }

    bool acyclic = true;
    try {
        (void)dag.topological_order();
    } catch (const StructuralError&) {
        acyclic = false;
        out.push_back({ViolationKind::Cycle, "topological order does not exist"});
    }

    // On a cyclic graph every task may have a parent; report only when acyclic
    // or the graph is empty, where the missing entry is the real problem.
    if (dag.entries().empty() && (acyclic || dag.empty())) {
        out.push_back({ViolationKind::NoEntry, "no task without parents"});
    }
    if (dag.exits().empty() && (acyclic || dag.empty())) {
        out.push_back({ViolationKind::NoExit, "no task without children"});
    }
    return out;
}

void require_valid(const WorkflowDag& dag) {
    auto violations = validate_dag(dag);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid workflow:";
    for (const auto& v : violations) msg << ' ' << to_string(v.kind) << " (" << v.detail << ");";
    throw StructuralError(msg.str());
}

std::vector<int> level_numbers(const WorkflowDag& dag) {
    std::vector<int> level(dag.size(), 1);
    for (TaskIndex t : dag.topological_order()) {
        for (const auto& p : dag.parents(t)) level[t] = std::max(level[t], level[p.task] + 1);
    }
    return level;
}

WidthProfile width_profile(std::span<const std::size_t> per_level) {
    WidthProfile profile;
    profile.per_level.assign(per_level.begin(), per_level.end());
    if (per_level.empty()) return profile;

    const double count = static_cast<double>(per_level.size());
    const double total = std::accumulate(per_level.begin(), per_level.end(), 0.0);
    profile.max_width = *std::max_element(per_level.begin(), per_level.end());
    profile.avg_width = total / count;
    double ss = 0.0;
    for (std::size_t w : per_level) {
        const double d = static_cast<double>(w) - profile.avg_width;
        ss += d * d;
    }
    profile.stddev_width = std::sqrt(ss / count);
    return profile;
}

WidthProfile width_profile(const WorkflowDag& dag) {
    auto levels = level_numbers(dag);
    std::vector<std::size_t> widths;
    for (int l : levels) {
        if (static_cast<std::size_t>(l) > widths.size()) widths.resize(l, 0);
        ++widths[l - 1];
    }
    return width_profile(widths);
}

std::vector<TaskIndex> critical_path(const WorkflowDag& dag, double mips, double bandwidth_mbps) {
    const auto& order = dag.topological_order();
    if (order.empty()) return {};

    constexpr TaskIndex kNone = std::numeric_limits<TaskIndex>::max();
    std::vector<double> best(dag.size(), 0.0);
    std::vector<TaskIndex> next(dag.size(), kNone);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TaskIndex t = *it;
        double tail = 0.0;
        for (const auto& c : dag.children(t)) {
            const double via = c.data_mb / bandwidth_mbps + best[c.task];
            // children are sorted by index, so strict > keeps the smallest on ties
            if (next[t] == kNone || via > tail) {
                tail = via;
                next[t] = c.task;
            }
        }
        best[t] = dag.task(t).weight_mi / mips + tail;
    }

    TaskIndex start = kNone;
    for (TaskIndex e : dag.entries()) {
        if (start == kNone || best[e] > best[start]) start = e;
    }
    std::vector<TaskIndex> path;
    for (TaskIndex t = start; t != kNone; t = next[t]) path.push_back(t);
    return path;
}

std::vector<PipelineGroup> detect_pipelines(const WorkflowDag& dag) {
    (void)dag.topological_order();  // rejects cyclic input

    auto is_link = [&](TaskIndex t) {
        return dag.parents(t).size() == 1 && dag.children(t).size() == 1;
    };

    std::map<std::pair<TaskIndex, TaskIndex>, std::vector<Pipeline>> by_ends;
    for (TaskIndex s = 0; s < dag.size(); ++s) {
        if (dag.children(s).size() < 2) continue;
        for (const auto& c : dag.children(s)) {
            if (!is_link(c.task)) continue;
            Pipeline p;
            p.head = c.task;
            p.source = s;
            TaskIndex cur = c.task;
            while (true) {
                p.body.push_back(cur);
                p.length_mi += dag.task(cur).weight_mi;
                const TaskIndex nxt = dag.children(cur).front().task;
                if (!is_link(nxt)) {
                    p.sink = nxt;
                    break;
                }
                cur = nxt;
            }
            by_ends[{s, p.sink}].push_back(std::move(p));
        }
    }

    std::vector<PipelineGroup> groups;
    for (auto& [ends, pipes] : by_ends) {
        if (pipes.size() < 2) continue;
        PipelineGroup g;
        g.source = ends.first;
        g.sink = ends.second;
        g.pipelines = std::move(pipes);

        std::vector<std::size_t> order(g.pipelines.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (g.pipelines[a].length_mi != g.pipelines[b].length_mi) {
                return g.pipelines[a].length_mi > g.pipelines[b].length_mi;
            }
            return g.pipelines[a].head < g.pipelines[b].head;
        });
        g.longest_mi = g.pipelines[order.front()].length_mi;

        std::vector<double> load;
        for (std::size_t idx : order) {
            const double len = g.pipelines[idx].length_mi;
            std::size_t bin = 0;
            while (bin < load.size() && load[bin] + len > g.longest_mi) ++bin;
            if (bin == load.size()) {
                load.push_back(0.0);
                g.subgroups.emplace_back();
            }
            load[bin] += len;
            g.subgroups[bin].push_back(idx);
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace wfsched
