#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfsched/cloud.hpp"
#include "wfsched/scheduler.hpp"
#include "wfsched/workflow.hpp"

namespace wfsched {

/// The replay disagrees with the times the scheduler claimed.
class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& task, const std::string& what)
        : std::runtime_error(what), task_(task) {}
    const std::string& task() const { return task_; }

private:
    std::string task_;
};

struct TaskTrace {
    TaskIndex task = 0;
    std::size_t vm = 0;
    double ast_s = 0.0;
    double aft_s = 0.0;
    double utilization = 1.0;
    bool duplicate = false;
};

struct VmTrace {
    VmInstance vm;
    std::size_t billed_periods = 0;
    double cost = 0.0;
    double energy_kwh = 0.0;
    double tits_s = 0.0;   // idle time spent only because data was in transit
    double idle_s = 0.0;   // every gap between availability and the last finish
    double cumulative_cost = 0.0;  // per-task aggregation with idle slots and lead time
};

struct ExecutionTrace {
    double makespan_s = 0.0;
    double total_cost = 0.0;
    double total_energy_kwh = 0.0;
    double cumulative_cost = 0.0;
    std::vector<TaskTrace> per_task;    // indexed by TaskIndex
    std::vector<TaskTrace> duplicates;
    std::vector<VmTrace> per_vm;
};

struct SimulationOptions {
    /// Allowed gap between claimed and replayed AST/AFT, in seconds.
    double tolerance_s = 1e-6;
    bool check_claims = true;
};

/// Replays the schedule: every start is recomputed from VM availability, the
/// previous task on the VM, parent data arrival and any dispatch hold.
ExecutionTrace simulate(const Schedule& schedule, const WorkflowDag& dag,
                        const InstanceCatalog& catalog, const SimulationOptions& options = {});

struct Feasibility {
    bool cost_ok = false;
    bool time_ok = false;
};

Feasibility check_feasibility(const ExecutionTrace& trace, const QosConstraints& qos);

/// Copy of `schedule` with every execution moved to its replayed times.
Schedule replayed_schedule(const Schedule& schedule, const ExecutionTrace& trace);

nlohmann::json trace_to_json(const ExecutionTrace& trace, const WorkflowDag& dag);

}  // namespace wfsched
