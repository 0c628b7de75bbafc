#include "wfsched/scheduler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wfsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeTolerance = 1e-9;

double population_stddev(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

bool close_enough(double a, double b) {
    return std::fabs(a - b) <= kTimeTolerance * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::Smwso: return "smwso";
        case Algorithm::Smwsh: return "smwsh";
        case Algorithm::Heft: return "heft";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "smwso") return Algorithm::Smwso;
    if (lower == "smwsh") return Algorithm::Smwsh;
    if (lower == "heft") return Algorithm::Heft;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

EarliestTimes est_eft(const WorkflowDag& dag, double mips, double bandwidth_mbps) {
    EarliestTimes out;
    out.est.assign(dag.size(), 0.0);
    out.eft.assign(dag.size(), 0.0);
    for (TaskIndex t : dag.topological_order()) {
        double start = 0.0;
        for (const auto& p : dag.parents(t)) {
            start = std::max(start, out.eft[p.task] + p.data_mb / bandwidth_mbps);
        }
        out.est[t] = start;
        out.eft[t] = start + dag.task(t).weight_mi / mips;
    }
    for (TaskIndex t : dag.exits()) out.min_makespan_s = std::max(out.min_makespan_s, out.eft[t]);
    return out;
}

EarliestTimes est_eft(const WorkflowDag& dag, const InstanceCatalog& catalog) {
    return est_eft(dag, catalog.fastest().mips, catalog.bandwidth_mbps());
}

std::size_t onvm(const WidthProfile& profile) {
    double n = profile.avg_width <= profile.stddev_width
                   ? profile.avg_width
                   : std::min(profile.avg_width + profile.stddev_width,
                              static_cast<double>(profile.max_width));
    return static_cast<std::size_t>(std::max(1.0, std::round(n)));
}

double estimate_makespan(const WorkflowDag& dag, const InstanceType& type, std::size_t vm_count,
                         double bandwidth_mbps) {
    double total = 0.0;
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        double max_tt = 0.0;
        for (const auto& c : dag.children(t)) max_tt = std::max(max_tt, c.data_mb / bandwidth_mbps);
        total += et(dag.task(t).weight_mi, type) + max_tt;
    }
    return total / static_cast<double>(std::max<std::size_t>(vm_count, 1));
}

std::size_t optimal_instance_type(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                  const QosConstraints& qos, std::size_t vm_count) {
    const double slice = qos.budget / static_cast<double>(std::max<std::size_t>(vm_count, 1));
    std::optional<std::size_t> budget_only;
    for (std::size_t k = catalog.size(); k-- > 0;) {
        const double estimate = estimate_makespan(dag, catalog[k], vm_count, catalog.bandwidth_mbps());
        const bool in_budget = ec(estimate, catalog[k], catalog.billing_period_s()) <= slice;
        if (in_budget && estimate <= qos.deadline_s) return k;
        if (in_budget && !budget_only) budget_only = k;
    }
    return budget_only.value_or(0);
}

ProvisionPlan make_provision_plan(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                  const QosConstraints& qos) {
    ProvisionPlan plan;
    plan.widths = width_profile(dag);
    plan.opt_vm_count = onvm(plan.widths);
    plan.opt_type_index = optimal_instance_type(dag, catalog, qos, plan.opt_vm_count);
    plan.opt_instance = catalog[plan.opt_type_index];
    plan.estimated_makespan_s =
        estimate_makespan(dag, plan.opt_instance, plan.opt_vm_count, catalog.bandwidth_mbps());
    return plan;
}

SubDeadlines distribute_deadline(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                 std::size_t opt_type_index, const QosConstraints& qos) {
    const auto times = est_eft(dag, catalog[opt_type_index].mips, catalog.bandwidth_mbps());
    SubDeadlines out;
    out.below_lower_bound = qos.deadline_s < times.min_makespan_s;
    out.scaled.resize(dag.size());
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        out.scaled[t] = times.eft[t] * qos.deadline_s / times.min_makespan_s;
    }

    const double max_scaled = dag.empty() ? 0.0 : *std::max_element(out.scaled.begin(), out.scaled.end());
    out.spare_total = std::max(0.0, qos.deadline_s - max_scaled);

    double cp_mi = 0.0;
    for (TaskIndex t : critical_path(dag, catalog.fastest().mips, catalog.bandwidth_mbps())) {
        cp_mi += dag.task(t).weight_mi;
    }
    out.spare.resize(dag.size());
    out.per_task.resize(dag.size());
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        out.spare[t] = cp_mi > 0.0 ? out.spare_total * dag.task(t).weight_mi / cp_mi : 0.0;
        out.per_task[t] = out.scaled[t] + out.spare[t];
    }
    return out;
}

Ranking rank_u(const WorkflowDag& dag, const InstanceCatalog& catalog) {
    Ranking r;
    r.rank.assign(dag.size(), 0.0);
    r.inputs.resize(dag.size());
    std::vector<double> times(catalog.size());
    const auto& order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TaskIndex t = *it;
        for (std::size_t k = 0; k < catalog.size(); ++k) times[k] = et(dag.task(t).weight_mi, catalog[k]);
        auto& in = r.inputs[t];
        in.sigma = population_stddev(times);
        in.outdegree = dag.children(t).size();
        double occw = 0.0;
        double best_child = 0.0;
        for (const auto& c : dag.children(t)) {
            occw += c.data_mb / catalog.bandwidth_mbps();
            best_child = std::max(best_child, r.rank[c.task]);
        }
        in.avg_occw = in.outdegree > 0 ? occw / static_cast<double>(in.outdegree) : 0.0;
        r.rank[t] = in.sigma + static_cast<double>(in.outdegree) + in.avg_occw + best_child;
    }
    r.order.resize(dag.size());
    std::iota(r.order.begin(), r.order.end(), TaskIndex{0});
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](TaskIndex a, TaskIndex b) { return r.rank[a] > r.rank[b]; });
    r.position.resize(dag.size());
    for (std::size_t i = 0; i < r.order.size(); ++i) r.position[r.order[i]] = i;
    return r;
}

Baselines fs_lb(const WorkflowDag& dag, const InstanceCatalog& catalog) {
    Baselines b;
    for (TaskIndex t : critical_path(dag, catalog.fastest().mips, catalog.bandwidth_mbps())) {
        b.fastest_schedule_s += et(dag.task(t).weight_mi, catalog.fastest());
    }
    for (const auto& task : dag.tasks()) {
        b.lowest_budget += ec(et(task.weight_mi, catalog.cheapest()), catalog.cheapest(),
                              catalog.billing_period_s());
    }
    return b;
}

// ---------------------------------------------------------------------------

std::vector<std::string> verify_schedule(const Schedule& schedule, const WorkflowDag& dag,
                                         const InstanceCatalog& catalog) {
    std::vector<std::string> out;
    auto name = [&](TaskIndex t) { return dag.task(t).id; };

    if (schedule.tasks.size() != dag.size()) {
        out.push_back("schedule covers " + std::to_string(schedule.tasks.size()) + " of " +
                      std::to_string(dag.size()) + " tasks");
        return out;
    }
    std::vector<std::vector<const Execution*>> copies(dag.size());
    std::vector<std::vector<const Execution*>> per_vm(schedule.vms.size());
    auto check_one = [&](const Execution& e) {
        if (e.vm >= schedule.vms.size()) {
            out.push_back(name(e.task) + ": unknown vm " + std::to_string(e.vm));
            return;
        }
        if (!(e.utilization > 0.0 && e.utilization <= 1.0)) {
            out.push_back(name(e.task) + ": utilization out of (0,1]");
        }
        const auto& vm = schedule.vms[e.vm];
        const double duration = et(dag.task(e.task).weight_mi, vm.type) / e.utilization;
        if (!close_enough(e.finish_s - e.start_s, duration)) {
            out.push_back(name(e.task) + ": duration differs from ET/u");
        }
        if (e.start_s < vm.lease_start_s + catalog.provisioning_delay_s() - kTimeTolerance) {
            out.push_back(name(e.task) + ": starts before its VM is available");
        }
        copies[e.task].push_back(&e);
        per_vm[e.vm].push_back(&e);
    };
    for (TaskIndex t = 0; t < dag.size(); ++t) {
        if (schedule.tasks[t].task != t) out.push_back("execution slot " + name(t) + " holds another task");
        check_one(schedule.tasks[t]);
    }
    for (const auto& d : schedule.duplicates) {
        if (d.task >= dag.size() || !dag.is_entry(d.task)) {
            out.push_back("duplicate of a non-entry task");
            continue;
        }
        check_one(d);
    }
    if (!out.empty()) return out;

    for (TaskIndex t = 0; t < dag.size(); ++t) {
        for (const Execution* e : copies[t]) {
            for (const auto& p : dag.parents(t)) {
                double ready = kInf;
                for (const Execution* pc : copies[p.task]) {
                    ready = std::min(ready, pc->finish_s + tt(p.data_mb, pc->vm == e->vm,
                                                              catalog.bandwidth_mbps()));
                }
                if (e->start_s + kTimeTolerance * std::max(1.0, ready) < ready) {
                    out.push_back("precedence " + name(p.task) + " -> " + name(t) + " violated");
                }
            }
        }
    }
    for (std::size_t v = 0; v < per_vm.size(); ++v) {
        auto& list = per_vm[v];
        std::sort(list.begin(), list.end(),
                  [](const Execution* a, const Execution* b) { return a->start_s < b->start_s; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i]->start_s + kTimeTolerance * std::max(1.0, list[i]->start_s) < list[i - 1]->finish_s) {
                out.push_back("overlap on vm " + std::to_string(v) + ": " + name(list[i - 1]->task) +
                              " and " + name(list[i]->task));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ScheduleBuilder::ScheduleBuilder(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                 Algorithm algorithm, ProvisionPlan plan, SchedulerOptions options,
                                 std::optional<SubDeadlines> deadlines)
    : dag_(dag),
      catalog_(catalog),
      algorithm_(algorithm),
      plan_(std::move(plan)),
      options_(options),
      deadlines_(std::move(deadlines)),
      ranking_(rank_u(dag, catalog)) {
    const std::size_t n = dag.size();
    tasks_.resize(n);
    placed_.assign(n, false);
    copies_.resize(n);
    pinned_.resize(n);
    pending_dup_.resize(n);
    head_of_.resize(n);

    if (algorithm_ == Algorithm::Smwsh && !deadlines_) {
        throw std::invalid_argument("SMWSH scheduling needs sub-deadlines");
    }
    if (algorithm_ == Algorithm::Heft) return;

    if (options_.pipeline_merging) {
        groups_ = detect_pipelines(dag_);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            for (std::size_t s = 0; s < groups_[g].subgroups.size(); ++s) {
                for (std::size_t p : groups_[g].subgroups[s]) {
                    head_of_[groups_[g].pipelines[p].head] = PipelineRef{g, p, s};
                }
            }
        }
    }
    if (options_.duplication) {
        const auto& widths = plan_.widths.per_level;
        const long first = widths.empty() ? 0 : static_cast<long>(widths[0]);
        const long second = widths.size() > 1 ? static_cast<long>(widths[1]) : 0;
        const long due = std::min(static_cast<long>(plan_.opt_vm_count), second) - first;
        duplications_left_ = std::max(0L, due);
    }
    if (algorithm_ == Algorithm::Smwsh) {
        provision(plan_.opt_type_index, catalog_.provisioning_delay_s(), VmRole::Base);
    }
}

const InstanceType& ScheduleBuilder::vm_type(std::size_t vm) const {
    return catalog_[vms_[vm].type_index];
}

double ScheduleBuilder::exec_time(TaskIndex t, std::size_t vm) const {
    return et(dag_.task(t).weight_mi, vm_type(vm));
}

double ScheduleBuilder::data_ready(TaskIndex t, std::optional<std::size_t> vm,
                                   bool ignore_duplicates_on_vm) const {
    double ready = 0.0;
    for (const auto& p : dag_.parents(t)) {
        double best = kInf;
        for (const auto& c : copies_[p.task]) {
            const bool same = vm && c.vm == *vm;
            if (ignore_duplicates_on_vm && same && c.duplicate) continue;
            best = std::min(best, c.finish_s + tt(p.data_mb, same, catalog_.bandwidth_mbps()));
        }
        if (best == kInf) {
            throw std::logic_error("parent " + dag_.task(p.task).id + " of " + dag_.task(t).id +
                                   " is not placed yet");
        }
        ready = std::max(ready, best);
    }
    return ready;
}

double ScheduleBuilder::earliest_slot(std::size_t vm, double ready, double duration) const {
    const auto& state = vms_[vm];
    double candidate = std::max(ready, state.available_s);
    for (const auto& iv : state.busy) {
        if (candidate + duration <= iv.start_s) return candidate;
        candidate = std::max(candidate, iv.finish_s);
    }
    return candidate;
}

double ScheduleBuilder::fresh_vm_start(TaskIndex t) const {
    return std::max(data_ready(t, std::nullopt), catalog_.provisioning_delay_s());
}

std::size_t ScheduleBuilder::provision(std::size_t type_index, double first_start_s, VmRole role) {
    VmState vm;
    vm.type_index = type_index;
    vm.lease_start_s = std::max(0.0, first_start_s - catalog_.provisioning_delay_s());
    vm.available_s = vm.lease_start_s + catalog_.provisioning_delay_s();
    vm.role = role;
    vms_.push_back(std::move(vm));
    if (role == VmRole::Base) ++base_vms_;
    if (role == VmRole::Duplication) ++dup_vms_;
    return vms_.size() - 1;
}

std::size_t ScheduleBuilder::commit(const VmChoice& choice, VmRole role) {
    if (choice.vm) return *choice.vm;
    return provision(choice.new_type, choice.start_s, role);
}

VmChoice ScheduleBuilder::select_vm_smwso(TaskIndex t) const {
    const double fresh = fresh_vm_start(t);
    VmChoice fresh_choice{std::nullopt, plan_.opt_type_index, fresh,
                          fresh + et(dag_.task(t).weight_mi, plan_.opt_instance)};
    std::optional<VmChoice> best;
    for (std::size_t v = 0; v < vms_.size(); ++v) {
        const double d = exec_time(t, v);
        const double s = earliest_slot(v, data_ready(t, v), d);
        if (!best || s + d < best->finish_s) best = VmChoice{v, vms_[v].type_index, s, s + d};
    }
    if (!best) return fresh_choice;
    if (best->start_s > fresh && base_vms_ < plan_.opt_vm_count) return fresh_choice;
    return *best;
}

VmChoice ScheduleBuilder::select_vm_smwsh(TaskIndex t) const {
    const double deadline = deadlines_->per_task[t];
    const double fresh = fresh_vm_start(t);

    std::size_t new_type = catalog_.size() - 1;
    for (std::size_t k = 0; k < catalog_.size(); ++k) {
        if (fresh + et(dag_.task(t).weight_mi, catalog_[k]) <= deadline) {
            new_type = k;
            break;
        }
    }
    VmChoice fresh_choice{std::nullopt, new_type, fresh,
                          fresh + et(dag_.task(t).weight_mi, catalog_[new_type])};

    std::optional<VmChoice> best_ok;
    std::optional<VmChoice> best_any;
    for (std::size_t v = 0; v < vms_.size(); ++v) {
        const double d = exec_time(t, v);
        const double s = earliest_slot(v, data_ready(t, v), d);
        const VmChoice c{v, vms_[v].type_index, s, s + d};
        if (!best_any || c.finish_s < best_any->finish_s) best_any = c;
        if (c.finish_s <= deadline && (!best_ok || c.finish_s < best_ok->finish_s)) best_ok = c;
    }
    if (best_ok && best_ok->start_s <= fresh) return *best_ok;
    if (base_vms_ < plan_.opt_vm_count || !best_any) return fresh_choice;
    return *best_any;
}

VmChoice ScheduleBuilder::select_vm_heft(TaskIndex t) const {
    std::optional<VmChoice> best;
    for (std::size_t v = 0; v < vms_.size(); ++v) {
        const double d = exec_time(t, v);
        const double s = earliest_slot(v, data_ready(t, v), d);
        if (!best || s + d < best->finish_s) best = VmChoice{v, vms_[v].type_index, s, s + d};
    }
    if (!best) throw std::logic_error("HEFT needs a non-empty VM pool");
    return *best;
}

VmChoice ScheduleBuilder::select(TaskIndex t) const {
    switch (algorithm_) {
        case Algorithm::Smwso: return select_vm_smwso(t);
        case Algorithm::Smwsh: return select_vm_smwsh(t);
        case Algorithm::Heft: return select_vm_heft(t);
    }
    throw std::logic_error("unreachable");
}

void ScheduleBuilder::place(const Execution& e) {
    auto& busy = vms_[e.vm].busy;
    Interval iv{e.start_s, e.finish_s};
    busy.insert(std::upper_bound(busy.begin(), busy.end(), iv,
                                 [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; }),
                iv);
    copies_[e.task].push_back({e.vm, e.finish_s, e.duplicate});
    if (e.duplicate) {
        duplicates_.push_back(e);
    } else {
        tasks_[e.task] = e;
        placed_[e.task] = true;
    }
}

const Execution& ScheduleBuilder::assign(TaskIndex t, std::size_t vm) {
    const double d = exec_time(t, vm);
    const double s = earliest_slot(vm, data_ready(t, vm), d);
    place(Execution{t, vm, s, s + d, 1.0, 0.0, false});
    return tasks_[t];
}

void ScheduleBuilder::place_pinned(TaskIndex t) {
    const std::size_t vm = *pinned_[t];
    const double d = exec_time(t, vm);
    const double s = earliest_slot(vm, data_ready(t, vm), d);
    if (pending_dup_[t]) {
        auto& rec = duplications_[*pending_dup_[t]];
        rec.ast_with_s = s;
        rec.ast_without_s = earliest_slot(vm, data_ready(t, vm, true), d);
    }
    place(Execution{t, vm, s, s + d, 1.0, 0.0, false});
}

void ScheduleBuilder::duplicate_entry(TaskIndex entry) {
    if (algorithm_ == Algorithm::Heft || !options_.duplication) return;
    if (!dag_.is_entry(entry) || !placed_[entry] || duplications_left_ <= 0) return;

    std::vector<TaskIndex> single_parent;
    for (const auto& c : dag_.children(entry)) {
        if (dag_.parents(c.task).size() == 1) single_parent.push_back(c.task);
    }
    if (single_parent.size() < 2) return;
    std::sort(single_parent.begin(), single_parent.end(), [&](TaskIndex a, TaskIndex b) {
        return ranking_.position[a] < ranking_.position[b];
    });

    const Execution& home = tasks_[entry];
    const double home_et = exec_time(entry, home.vm);
    const double weight = dag_.task(entry).weight_mi;
    const double delay = catalog_.provisioning_delay_s();

    for (std::size_t i = 0; i + 1 < single_parent.size() && duplications_left_ > 0; ++i) {
        const TaskIndex child = single_parent[i];
        if (pinned_[child] || placed_[child]) continue;
        const double transfer = dag_.data_mb(entry, child) / catalog_.bandwidth_mbps();
        const double limit = home_et + transfer;            // ET(i,vm_p) < ET(i,map(i)) + TT(i,j)
        const double arrival = home.finish_s + transfer;    // data-ready without the copy

        std::optional<std::size_t> target;
        double target_start = 0.0;
        double target_cost = kInf;
        double target_finish = kInf;
        for (std::size_t v = 0; v < vms_.size(); ++v) {
            if (v == home.vm) continue;
            bool hosts = false;
            for (const auto& c : copies_[entry]) hosts = hosts || c.vm == v;
            if (hosts) continue;
            const double d = exec_time(entry, v);
            if (!(d < limit)) continue;
            const double s = earliest_slot(v, 0.0, d);
            if (!(s + d < arrival)) continue;
            const double cost = vm_type(v).cost_per_period;
            if (cost < target_cost || (cost == target_cost && s + d < target_finish)) {
                target = v;
                target_start = s;
                target_cost = cost;
                target_finish = s + d;
            }
        }
        if (!target) {
            std::optional<std::size_t> type;
            auto fits = [&](std::size_t k) {
                const double d = et(weight, catalog_[k]);
                return d < limit && delay + d < arrival;
            };
            if (algorithm_ == Algorithm::Smwso) {
                if (fits(plan_.opt_type_index)) type = plan_.opt_type_index;
            } else {
                for (std::size_t k = 0; k < catalog_.size() && !type; ++k) {
                    if (fits(k)) type = k;
                }
            }
            if (!type) continue;
            target = provision(*type, delay, VmRole::Duplication);
            target_start = vms_[*target].available_s;
        }

        const double d = exec_time(entry, *target);
        place(Execution{entry, *target, target_start, target_start + d, 1.0, 0.0, true});
        pinned_[child] = *target;
        pending_dup_[child] = duplications_.size();
        duplications_.push_back(DuplicationRecord{entry, child, *target, 0.0, 0.0});
        --duplications_left_;
    }

    for (TaskIndex child : single_parent) {
        if (!pinned_[child] && !placed_[child]) {
            pinned_[child] = home.vm;
            break;
        }
    }
}

bool ScheduleBuilder::merge_and_slack(TaskIndex head) {
    if (!head_of_[head] || placed_[head]) return false;
    const PipelineRef ref = *head_of_[head];
    const PipelineGroup& group = groups_[ref.group];

    std::size_t vm = 0;
    if (pinned_[head]) {
        vm = *pinned_[head];
    } else {
        vm = commit(select(head));
    }

    struct Member {
        const Pipeline* pipe;
        double ready;
    };
    std::vector<Member> members;
    for (std::size_t idx : group.subgroups[ref.subgroup]) {
        const Pipeline& p = group.pipelines[idx];
        if (placed_[p.head]) continue;
        if (p.head != head && pinned_[p.head] && *pinned_[p.head] != vm) continue;
        members.push_back({&p, data_ready(p.head, vm)});
    }
    std::stable_sort(members.begin(), members.end(), [&](const Member& a, const Member& b) {
        if (a.ready != b.ready) return a.ready < b.ready;
        return ranking_.position[a.pipe->head] < ranking_.position[b.pipe->head];
    });

    const double mips = vm_type(vm).mips;
    double sum_mi = 0.0;
    for (const auto& m : members) sum_mi += m.pipe->length_mi;
    const double sum_s = sum_mi / mips;
    const double longest_same_speed = group.longest_mi / mips;
    double target = longest_same_speed;
    const TaskIndex longest_head = group.pipelines[group.subgroups.front().front()].head;
    if (placed_[longest_head]) {
        target = std::min(target, group.longest_mi / vm_type(tasks_[longest_head].vm).mips);
    }

    double u = 1.0;
    if (options_.slacking && sum_s < target) {
        const double slack = target - sum_s;
        u = options_.slack_mode == SlackMode::Normalized ? sum_s / (sum_s + slack)
                                                         : target / (target + slack);
        u = std::clamp(u, std::numeric_limits<double>::min(), 1.0);
    }

    // Earliest block start that lets every member pipeline begin after its data
    // arrives while the block stays contiguous.
    auto block_lower = [&](bool ignore_dups) {
        double lower = 0.0;
        double offset = 0.0;
        for (const auto& m : members) {
            const double ready = ignore_dups ? data_ready(m.pipe->head, vm, true) : m.ready;
            lower = std::max(lower, ready - offset);
            for (TaskIndex x : m.pipe->body) offset += exec_time(x, vm) / u;
        }
        return std::pair{lower, offset};
    };
    const auto [lower, span] = block_lower(false);
    const double start = earliest_slot(vm, lower, span);

    SlackRecord rec;
    rec.vm = vm;
    rec.start_s = start;
    rec.utilization = u;
    rec.sum_s = sum_s;
    rec.target_span_s = span;
    rec.longest_same_speed_s = longest_same_speed;

    std::optional<double> start_without_dup;
    double cursor = start;
    bool first = true;
    for (const auto& m : members) {
        const double head_offset = cursor - start;
        for (TaskIndex x : m.pipe->body) {
            const double d = exec_time(x, vm) / u;
            const double s = std::max(cursor, data_ready(x, vm));
            if (x == m.pipe->head && pending_dup_[x]) {
                if (!start_without_dup) {
                    const auto [lower_wo, span_wo] = block_lower(true);
                    start_without_dup = earliest_slot(vm, lower_wo, span_wo);
                }
                auto& dup = duplications_[*pending_dup_[x]];
                dup.ast_with_s = s;
                dup.ast_without_s = *start_without_dup + head_offset;
            }
            place(Execution{x, vm, s, s + d, u, first ? start : 0.0, false});
            first = false;
            rec.tasks.push_back(x);
            cursor = s + d;
        }
    }
    rec.finish_s = cursor;
    slacking_.push_back(std::move(rec));
    return true;
}

void ScheduleBuilder::run() {
    for (TaskIndex t : ranking_.order) {
        if (placed_[t]) continue;
        if (merge_and_slack(t)) continue;
        if (pinned_[t]) {
            place_pinned(t);
        } else {
            assign(t, commit(select(t)));
        }
        if (dag_.is_entry(t)) duplicate_entry(t);
    }
}

Schedule ScheduleBuilder::finish() && {
    for (TaskIndex t = 0; t < dag_.size(); ++t) {
        if (!placed_[t]) throw std::logic_error("task " + dag_.task(t).id + " was never placed");
    }

    // Drop VMs that never ran anything and renumber the rest.
    std::vector<double> last_finish(vms_.size(), -kInf);
    for (const auto& e : tasks_) last_finish[e.vm] = std::max(last_finish[e.vm], e.finish_s);
    for (const auto& e : duplicates_) last_finish[e.vm] = std::max(last_finish[e.vm], e.finish_s);
    std::vector<std::size_t> remap(vms_.size(), 0);

    Schedule s;
    s.algorithm = algorithm_;
    if (algorithm_ != Algorithm::Heft) s.plan = plan_;
    for (std::size_t v = 0; v < vms_.size(); ++v) {
        if (last_finish[v] == -kInf) continue;
        remap[v] = s.vms.size();
        VmInstance vm;
        vm.id = s.vms.size();
        vm.type = catalog_[vms_[v].type_index];
        vm.lease_start_s = vms_[v].lease_start_s;
        vm.lease_end_s = last_finish[v];
        s.vms.push_back(std::move(vm));
        s.vm_roles.push_back(vms_[v].role);
        if (vms_[v].role == VmRole::Base) ++s.base_vm_count;
        if (vms_[v].role == VmRole::Duplication) ++s.duplication_vm_count;
    }
    auto add_busy = [&](Execution& e) {
        e.vm = remap[e.vm];
        s.vms[e.vm].busy_intervals.push_back({e.start_s, e.finish_s, e.utilization});
    };
    s.tasks = std::move(tasks_);
    s.duplicates = std::move(duplicates_);
    for (auto& e : s.tasks) add_busy(e);
    for (auto& e : s.duplicates) add_busy(e);
    for (auto& vm : s.vms) {
        std::sort(vm.busy_intervals.begin(), vm.busy_intervals.end(),
                  [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    }
    s.slacking = std::move(slacking_);
    for (auto& r : s.slacking) r.vm = remap[r.vm];
    s.duplications = std::move(duplications_);
    for (auto& r : s.duplications) r.vm = remap[r.vm];
    return s;
}

// ---------------------------------------------------------------------------

Schedule schedule_smwso(const WorkflowDag& dag, const InstanceCatalog& catalog,
                        const QosConstraints& qos, const SchedulerOptions& options) {
    require_valid(dag);
    ScheduleBuilder builder(dag, catalog, Algorithm::Smwso, make_provision_plan(dag, catalog, qos),
                            options);
    builder.run();
    return std::move(builder).finish();
}

Schedule schedule_smwsh(const WorkflowDag& dag, const InstanceCatalog& catalog,
                        const QosConstraints& qos, const SchedulerOptions& options) {
    require_valid(dag);
    auto plan = make_provision_plan(dag, catalog, qos);
    auto deadlines = distribute_deadline(dag, catalog, plan.opt_type_index, qos);
    ScheduleBuilder builder(dag, catalog, Algorithm::Smwsh, std::move(plan), options,
                            std::move(deadlines));
    builder.run();
    return std::move(builder).finish();
}

Schedule schedule_heft(const WorkflowDag& dag, const InstanceCatalog& catalog,
                       const QosConstraints& qos, std::vector<std::size_t> pool_types) {
    require_valid(dag);
    if (pool_types.empty()) {
        pool_types.resize(catalog.size());
        std::iota(pool_types.begin(), pool_types.end(), std::size_t{0});
    }
    ProvisionPlan plan;
    plan.widths = width_profile(dag);
    plan.opt_vm_count = pool_types.size();
    plan.opt_type_index = catalog.size() - 1;
    plan.opt_instance = catalog.fastest();
    (void)qos;  // the pool is fixed; constraints only matter for reporting
    ScheduleBuilder builder(dag, catalog, Algorithm::Heft, std::move(plan));
    for (std::size_t k : pool_types) {
        if (k >= catalog.size()) throw std::out_of_range("HEFT pool names an unknown type");
        builder.provision(k, catalog.provisioning_delay_s(), VmRole::Pool);
    }
    builder.run();
    return std::move(builder).finish();
}

Schedule run_algorithm(Algorithm algo, const WorkflowDag& dag, const InstanceCatalog& catalog,
                       const QosConstraints& qos, const SchedulerOptions& options) {
    switch (algo) {
        case Algorithm::Smwso: return schedule_smwso(dag, catalog, qos, options);
        case Algorithm::Smwsh: return schedule_smwsh(dag, catalog, qos, options);
        case Algorithm::Heft: return schedule_heft(dag, catalog, qos);
    }
    throw std::logic_error("unreachable");
}

}  // namespace wfsched
