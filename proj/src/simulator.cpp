#include "wfsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wfsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Slot {
    const Execution* planned;
    TaskTrace* out;
    bool done = false;
};

}  // namespace

ExecutionTrace simulate(const Schedule& schedule, const WorkflowDag& dag,
                        const InstanceCatalog& catalog, const SimulationOptions& options) {
    if (schedule.tasks.size() != dag.size()) {
        throw std::invalid_argument("schedule does not cover the workflow");
    }
    const std::size_t vm_count = schedule.vms.size();
    const double delay = catalog.provisioning_delay_s();

    ExecutionTrace trace;
    trace.per_task.resize(dag.size());
    trace.duplicates.resize(schedule.duplicates.size());

    // Per-VM queues in claimed start order.
    std::vector<std::vector<Slot>> queues(vm_count);
    std::vector<std::vector<const Slot*>> copies(dag.size());
    auto enqueue = [&](const Execution& e, TaskTrace& out) {
        if (e.vm >= vm_count) throw std::invalid_argument("execution on unknown vm");
        out.task = e.task;
        out.vm = e.vm;
        out.utilization = e.utilization;
        out.duplicate = e.duplicate;
        queues[e.vm].push_back(Slot{&e, &out});
    };
    for (std::size_t t = 0; t < dag.size(); ++t) enqueue(schedule.tasks[t], trace.per_task[t]);
    for (std::size_t i = 0; i < schedule.duplicates.size(); ++i) {
        enqueue(schedule.duplicates[i], trace.duplicates[i]);
    }
    for (auto& q : queues) {
        std::stable_sort(q.begin(), q.end(), [](const Slot& a, const Slot& b) {
            return a.planned->start_s < b.planned->start_s;
        });
        for (const auto& s : q) copies[s.planned->task].push_back(&s);
    }

    std::vector<std::size_t> next(vm_count, 0);
    std::vector<double> vm_free(vm_count);
    for (std::size_t v = 0; v < vm_count; ++v) vm_free[v] = schedule.vms[v].lease_start_s + delay;

    // Data-ready time on `vm` (first), and the same with free transfers
    // (second); nullopt while some parent copy is unresolved.
    auto data_ready = [&](TaskIndex t, std::size_t vm) -> std::optional<std::pair<double, double>> {
        double ready = 0.0, computed = 0.0;
        for (const auto& p : dag.parents(t)) {
            double best = kInf, best_free = kInf;
            for (const Slot* c : copies[p.task]) {
                if (!c->done) return std::nullopt;
                best = std::min(best, c->out->aft_s + tt(p.data_mb, c->out->vm == vm,
                                                         catalog.bandwidth_mbps()));
                best_free = std::min(best_free, c->out->aft_s);
            }
            ready = std::max(ready, best);
            computed = std::max(computed, best_free);
        }
        return std::pair{ready, computed};
    };
    std::vector<double> tits(vm_count, 0.0);

    std::size_t remaining = dag.size() + schedule.duplicates.size();
    const Slot* first_divergent = nullptr;
    while (remaining > 0) {
        bool progressed = false;
        for (std::size_t v = 0; v < vm_count; ++v) {
            while (next[v] < queues[v].size()) {
                Slot& s = queues[v][next[v]];
                const auto ready = data_ready(s.planned->task, v);
                if (!ready) break;
                const double ast = std::max({vm_free[v], ready->first, s.planned->release_s});
                // only the part of the wait that the transfer itself causes
                tits[v] += ast - std::max({vm_free[v], ready->second, s.planned->release_s});
                const double aft =
                    ast + et(dag.task(s.planned->task).weight_mi, schedule.vms[v].type) / s.planned->utilization;
                s.out->ast_s = ast;
                s.out->aft_s = aft;
                s.done = true;
                vm_free[v] = aft;
                ++next[v];
                --remaining;
                progressed = true;
                const bool diverges = std::fabs(ast - s.planned->start_s) > options.tolerance_s ||
                                      std::fabs(aft - s.planned->finish_s) > options.tolerance_s;
                if (diverges && (!first_divergent ||
                                 s.planned->start_s < first_divergent->planned->start_s)) {
                    first_divergent = &s;
                }
            }
        }
        if (!progressed) {
            for (std::size_t v = 0; v < vm_count; ++v) {
                if (next[v] < queues[v].size()) {
                    const auto& id = dag.task(queues[v][next[v]].planned->task).id;
                    throw ConsistencyError(id, "replay deadlocks at task " + id + " on vm " +
                                                   std::to_string(v));
                }
            }
        }
    }
    if (options.check_claims && first_divergent) {
        const Execution& e = *first_divergent->planned;
        const TaskTrace& got = *first_divergent->out;
        const auto& id = dag.task(e.task).id;
        throw ConsistencyError(id, "task " + id + " diverges: claimed [" + std::to_string(e.start_s) +
                                       ", " + std::to_string(e.finish_s) + "], replayed [" +
                                       std::to_string(got.ast_s) + ", " + std::to_string(got.aft_s) + "]");
    }

    trace.per_vm.resize(vm_count);
    for (std::size_t v = 0; v < vm_count; ++v) {
        VmTrace& out = trace.per_vm[v];
        out.vm = schedule.vms[v];
        out.vm.id = v;
        out.vm.busy_intervals.clear();
        double busy = 0.0;
        double last = out.vm.lease_start_s;
        std::vector<double> runtimes;
        for (const auto& s : queues[v]) {
            out.vm.busy_intervals.push_back({s.out->ast_s, s.out->aft_s, s.out->utilization});
            runtimes.push_back(s.out->aft_s - s.out->ast_s);
            busy += s.out->aft_s - s.out->ast_s;
            last = std::max(last, s.out->aft_s);
        }
        out.vm.lease_end_s = last;
        const double available = out.vm.lease_start_s + delay;
        out.tits_s = tits[v];
        out.idle_s = queues[v].empty() ? 0.0 : std::max(0.0, (last - available) - busy);
        const double lead = queues[v].empty() ? 0.0 : available - out.vm.lease_start_s;
        out.billed_periods = billed_periods(last - out.vm.lease_start_s, catalog.billing_period_s());
        out.cost = billing(out.vm, catalog.billing_period_s());
        // Transfer gaps plus the remaining waits (parents still computing on
        // other VMs, dispatch holds) and the lead time: the whole lease.
        out.cumulative_cost = cumulative_ec(runtimes, out.idle_s + lead, out.vm.type, catalog.billing_period_s());
        out.energy_kwh = energy_kwh(out.vm);

        trace.total_cost += out.cost;
        trace.cumulative_cost += out.cumulative_cost;
        trace.total_energy_kwh += out.energy_kwh;
    }
    for (TaskIndex t : dag.exits()) trace.makespan_s = std::max(trace.makespan_s, trace.per_task[t].aft_s);
    return trace;
}

Feasibility check_feasibility(const ExecutionTrace& trace, const QosConstraints& qos) {
    return {trace.total_cost <= qos.budget, trace.makespan_s <= qos.deadline_s};
}

Schedule replayed_schedule(const Schedule& schedule, const ExecutionTrace& trace) {
    Schedule out = schedule;
    auto move = [](Execution& e, const TaskTrace& t) {
        e.start_s = t.ast_s;
        e.finish_s = t.aft_s;
    };
    for (std::size_t t = 0; t < out.tasks.size(); ++t) move(out.tasks[t], trace.per_task[t]);
    for (std::size_t i = 0; i < out.duplicates.size(); ++i) move(out.duplicates[i], trace.duplicates[i]);
    for (std::size_t v = 0; v < out.vms.size(); ++v) out.vms[v] = trace.per_vm[v].vm;
    return out;
}

nlohmann::json trace_to_json(const ExecutionTrace& trace, const WorkflowDag& dag) {
    nlohmann::json doc;
    doc["makespan_s"] = trace.makespan_s;
    doc["total_cost"] = trace.total_cost;
    doc["total_energy_kwh"] = trace.total_energy_kwh;

    auto row = [&](const TaskTrace& t) {
        return nlohmann::json{{"task", dag.task(t.task).id},
                              {"vm", t.vm},
                              {"type", trace.per_vm[t.vm].vm.type.name},
                              {"ast", t.ast_s},
                              {"aft", t.aft_s},
                              {"utilization", t.utilization},
                              {"duplicate", t.duplicate}};
    };
    auto tasks = nlohmann::json::array();
    for (const auto& t : trace.per_task) tasks.push_back(row(t));
    for (const auto& t : trace.duplicates) tasks.push_back(row(t));
    doc["tasks"] = std::move(tasks);

    auto vms = nlohmann::json::array();
    for (const auto& v : trace.per_vm) {
        vms.push_back({{"vm", v.vm.id},
                       {"type", v.vm.type.name},
                       {"lease_start", v.vm.lease_start_s},
                       {"lease_end", v.vm.lease_end_s},
                       {"billed_periods", v.billed_periods},
                       {"energy_kwh", v.energy_kwh},
                       {"tits_s", v.tits_s},
                       {"idle_s", v.idle_s}});
    }
    doc["vms"] = std::move(vms);
    return doc;
}

}  // namespace wfsched
