#pragma once

// Fixtures and brute-force oracles shared by the unit tests and the acceptance
// runner. The oracles deliberately avoid the library's own algorithms: paths
// are enumerated explicitly and replays iterate to a fixed point.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wfsched/cloud.hpp"
#include "wfsched/scheduler.hpp"
#include "wfsched/workflow.hpp"

namespace wfsched::testing {

inline WorkflowDag make_dag(std::vector<Task> tasks, std::vector<Edge> edges = {}) {
    return WorkflowDag(std::move(tasks), std::move(edges));
}

// Two types with power-of-two speeds so schedule arithmetic stays exact.
inline InstanceCatalog tiny_catalog(double delay = 100.0) {
    return InstanceCatalog({{"slow", 1, 1.0, 100, 200}, {"fast", 2, 3.0, 120, 260}}, 20.0, 3600.0, delay);
}

inline InstanceCatalog single_type_catalog(double mips = 1.0, double delay = 100.0) {
    return InstanceCatalog({{"only", mips, 1.0, 100, 200}}, 20.0, 3600.0, delay);
}

// Montage with 20 tasks: 4 projections, 6 overlap diffs, fit, model, 4
// background corrections, table, add, shrink, jpeg.
inline WorkflowDag montage20() {
    std::vector<Task> tasks;
    auto add = [&](const std::string& id) { tasks.push_back({id, 10.0 + static_cast<double>(tasks.size())}); };
    for (int i = 1; i <= 4; ++i) add("p" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) add("d" + std::to_string(i));
    add("fit");
    add("model");
    for (int i = 1; i <= 4; ++i) add("b" + std::to_string(i));
    add("tbl");
    add("madd");
    add("shrink");
    add("zjpeg");
    std::vector<Edge> e;
    const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    for (int i = 0; i < 6; ++i) {
        const auto d = "d" + std::to_string(i + 1);
        e.push_back({"p" + std::to_string(pairs[i].first), d, 2.0});
        e.push_back({"p" + std::to_string(pairs[i].second), d, 2.0});
        e.push_back({d, "fit", 1.0});
    }
    e.push_back({"fit", "model", 1.0});
    for (int i = 1; i <= 4; ++i) {
        const auto b = "b" + std::to_string(i);
        e.push_back({"model", b, 1.0});
        e.push_back({"p" + std::to_string(i), b, 4.0});
        e.push_back({b, "tbl", 1.0});
    }
    e.push_back({"tbl", "madd", 1.0});
    e.push_back({"madd", "shrink", 8.0});
    e.push_back({"shrink", "zjpeg", 1.0});
    return WorkflowDag(std::move(tasks), std::move(e));
}

/// Every DAG on n labelled nodes whose edges go from lower to higher label
/// (covers every topology up to relabelling). Weights and data sizes follow a
/// fixed pattern of small integers / multiples of 20 MB.
inline std::vector<WorkflowDag> enumerate_small_dags(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    }
    std::vector<WorkflowDag> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << slots.size()); ++mask) {
        std::vector<Task> tasks;
        for (std::size_t i = 0; i < n; ++i) {
            tasks.push_back({std::string(1, static_cast<char>('a' + i)), static_cast<double>(40 + 24 * ((i * 7 + mask) % 5))});
        }
        std::vector<Edge> edges;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (mask & (std::size_t{1} << s)) {
                edges.push_back({tasks[slots[s].first].id, tasks[slots[s].second].id,
                                 20.0 * static_cast<double>((slots[s].first + slots[s].second + mask) % 4)});
            }
        }
        out.emplace_back(std::move(tasks), std::move(edges));
    }
    return out;
}

/// All entry-to-`t` paths (as index lists), by explicit recursion over parents.
inline void paths_into(const WorkflowDag& dag, TaskIndex t, std::vector<TaskIndex>& suffix,
                       std::vector<std::vector<TaskIndex>>& out) {
    suffix.push_back(t);
    if (dag.parents(t).empty()) {
        out.emplace_back(suffix.rbegin(), suffix.rend());
    } else {
        for (const auto& p : dag.parents(t)) paths_into(dag, p.task, suffix, out);
    }
    suffix.pop_back();
}

/// Weighted length of a path: every task at `mips`, every edge at data/bw.
inline double path_length(const WorkflowDag& dag, const std::vector<TaskIndex>& path, double mips, double bw) {
    double len = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        len += dag.task(path[i]).weight_mi / mips;
        if (i + 1 < path.size()) len += dag.data_mb(path[i], path[i + 1]) / bw;
    }
    return len;
}

struct OracleTimes {
    std::vector<double> est, eft;
};

/// EST(t) = longest path strictly before t (ending with the edge into t).
inline OracleTimes oracle_est_eft(const WorkflowDag& dag, double mips, double bw) {
    OracleTimes o;
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        std::vector<std::vector<TaskIndex>> paths;
        std::vector<TaskIndex> suffix;
        paths_into(dag, t, suffix, paths);
        double best = 0.0;
        for (const auto& p : paths) {
            best = std::max(best, path_length(dag, p, mips, bw) - dag.task(t).weight_mi / mips);
        }
        o.est.push_back(best);
        o.eft.push_back(best + dag.task(t).weight_mi / mips);
    }
    return o;
}

/// Longest entry-to-exit path; ties go to the lexicographically smallest index list.
inline std::vector<TaskIndex> oracle_critical_path(const WorkflowDag& dag, double mips, double bw) {
    std::vector<std::vector<TaskIndex>> all;
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        if (!dag.children(t).empty()) continue;
        std::vector<TaskIndex> suffix;
        paths_into(dag, t, suffix, all);
    }
    std::vector<TaskIndex> best;
    double best_len = -1.0;
    for (const auto& p : all) {
        const double len = path_length(dag, p, mips, bw);
        if (len > best_len || (len == best_len && p < best)) {
            best = p;
            best_len = len;
        }
    }
    return best;
}

struct OracleReplay {
    double makespan = 0.0;
    double cost = 0.0;
    std::vector<double> ast, aft;  // primary executions
};

/// Interval construction by fixed-point relaxation: start every execution at
/// zero and raise starts until no constraint (VM availability, VM order, data
/// arrival from the nearest copy, dispatch hold) is violated.
inline OracleReplay oracle_replay(const Schedule& s, const WorkflowDag& dag, const InstanceCatalog& catalog) {
    std::vector<Execution> all(s.tasks.begin(), s.tasks.end());
    all.insert(all.end(), s.duplicates.begin(), s.duplicates.end());
    const std::size_t m = all.size();
    std::vector<double> start(m, 0.0), finish(m, 0.0);
    auto duration = [&](std::size_t i) {
        return dag.task(all[i].task).weight_mi / s.vms[all[i].vm].type.mips / all[i].utilization;
    };
    // Predecessor on the same VM in claimed order.
    std::vector<std::ptrdiff_t> prev(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i || all[j].vm != all[i].vm) continue;
            const bool before = all[j].start_s < all[i].start_s || (all[j].start_s == all[i].start_s && j < i);
            if (before && all[j].start_s >= best) {
                best = all[j].start_s;
                prev[i] = static_cast<std::ptrdiff_t>(j);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) finish[i] = duration(i);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            double st = s.vms[all[i].vm].lease_start_s + catalog.provisioning_delay_s();
            st = std::max(st, all[i].release_s);
            if (prev[i] >= 0) st = std::max(st, finish[static_cast<std::size_t>(prev[i])]);
            for (const auto& p : dag.parents(all[i].task)) {
                double arrive = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < m; ++j) {
                    if (all[j].task != p.task) continue;
                    const double transfer = all[j].vm == all[i].vm ? 0.0 : p.data_mb / catalog.bandwidth_mbps();
                    arrive = std::min(arrive, finish[j] + transfer);
                }
                st = std::max(st, arrive);
            }
            if (st != start[i]) {
                start[i] = st;
                finish[i] = st + duration(i);
                changed = true;
            }
        }
    }
    OracleReplay r;
    r.ast.assign(start.begin(), start.begin() + static_cast<std::ptrdiff_t>(dag.size()));
    r.aft.assign(finish.begin(), finish.begin() + static_cast<std::ptrdiff_t>(dag.size()));
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        if (dag.children(t).empty()) r.makespan = std::max(r.makespan, finish[t]);
    }
    for (std::size_t v = 0; v < s.vms.size(); ++v) {
        double last = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (all[i].vm == v) last = std::max(last, finish[i]);
        }
        if (last < 0) continue;
        const double lease = last - s.vms[v].lease_start_s;
        r.cost += std::ceil(lease / catalog.billing_period_s()) * s.vms[v].type.cost_per_period;
    }
    return r;
}

}  // namespace wfsched::testing
