#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfsched/cloud.hpp"
#include "wfsched/workflow.hpp"

namespace wfsched {

struct QosConstraints {
    double deadline_s = 0.0;
    double budget = 0.0;
};

enum class Algorithm { Smwso, Smwsh, Heft };

std::string_view to_string(Algorithm algo);
/// Accepts "smwso", "smwsh", "heft" (case-insensitive); throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);

/// Utilization assigned to a merged pipeline subgroup with some slack.
/// Normalized stretches the subgroup to exactly the longest pipeline's span;
/// Ratio uses longest / (longest + slack).
enum class SlackMode { Normalized, Ratio };

struct SchedulerOptions {
    SlackMode slack_mode = SlackMode::Normalized;
    bool duplication = true;
    bool pipeline_merging = true;
    /// With merging on and slacking off, subgroups share a VM but run at u = 1.
    bool slacking = true;
};

// ---------------------------------------------------------------------------
// Structural estimates

struct EarliestTimes {
    std::vector<double> est;
    std::vector<double> eft;
    double min_makespan_s = 0.0;  // max EFT over exit tasks
};

/// EST/EFT with every edge paying its transfer and every task running at `mips`.
EarliestTimes est_eft(const WorkflowDag& dag, double mips, double bandwidth_mbps);
/// Same, on the fastest type of the catalog.
EarliestTimes est_eft(const WorkflowDag& dag, const InstanceCatalog& catalog);

/// Optimal number of VMs from the level-width profile, at least 1.
std::size_t onvm(const WidthProfile& profile);

/// Work-over-VMs makespan estimate for a single instance type.
double estimate_makespan(const WorkflowDag& dag, const InstanceType& type, std::size_t vm_count,
                         double bandwidth_mbps);

/// Fastest type whose estimate meets the deadline and whose cost fits B/ONVM.
/// Falls back to the fastest type meeting the budget slice, then the cheapest.
std::size_t optimal_instance_type(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                  const QosConstraints& qos, std::size_t vm_count);

struct ProvisionPlan {
    std::size_t opt_vm_count = 1;
    std::size_t opt_type_index = 0;
    InstanceType opt_instance;
    double estimated_makespan_s = 0.0;
    WidthProfile widths;
};

ProvisionPlan make_provision_plan(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                  const QosConstraints& qos);

struct SubDeadlines {
    std::vector<double> per_task;    // final sub-deadline
    std::vector<double> scaled;      // before spare distribution
    std::vector<double> spare;       // spare share per task
    double spare_total = 0.0;
    bool below_lower_bound = false;  // deadline shorter than the opt-type makespan
};

SubDeadlines distribute_deadline(const WorkflowDag& dag, const InstanceCatalog& catalog,
                                 std::size_t opt_type_index, const QosConstraints& qos);

struct RankInputs {
    double sigma = 0.0;  // population stddev of ET across the catalog
    std::size_t outdegree = 0;
    double avg_occw = 0.0;
};

struct Ranking {
    std::vector<double> rank;
    std::vector<RankInputs> inputs;
    std::vector<TaskIndex> order;     // descending rank, ties by index
    std::vector<std::size_t> position;  // inverse of order
};

Ranking rank_u(const WorkflowDag& dag, const InstanceCatalog& catalog);

struct Baselines {
    double fastest_schedule_s = 0.0;  // FS
    double lowest_budget = 0.0;       // LB
};

Baselines fs_lb(const WorkflowDag& dag, const InstanceCatalog& catalog);

// ---------------------------------------------------------------------------
// Schedules

struct Execution {
    TaskIndex task = 0;
    std::size_t vm = 0;
    double start_s = 0.0;
    double finish_s = 0.0;
    double utilization = 1.0;
    /// Dispatch time for tasks held back to keep a merged subgroup contiguous.
    double release_s = 0.0;
    bool duplicate = false;
};

enum class VmRole { Base, Duplication, Pool };

struct SlackRecord {
    std::size_t vm = 0;
    std::vector<TaskIndex> tasks;
    double start_s = 0.0;
    double finish_s = 0.0;
    double utilization = 1.0;
    double sum_s = 0.0;                  // unstretched work of the subgroup on this VM
    double target_span_s = 0.0;          // span the subgroup is stretched to
    double longest_same_speed_s = 0.0;   // longest pipeline of the group on this VM's speed
};

struct DuplicationRecord {
    TaskIndex entry = 0;
    TaskIndex child = 0;
    std::size_t vm = 0;
    double ast_with_s = 0.0;
    double ast_without_s = 0.0;
};

struct Schedule {
    Algorithm algorithm = Algorithm::Smwso;
    std::vector<Execution> tasks;       // indexed by TaskIndex
    std::vector<Execution> duplicates;  // extra copies of entry tasks
    std::vector<VmInstance> vms;        // ids equal positions
    std::vector<VmRole> vm_roles;
    std::optional<ProvisionPlan> plan;
    std::size_t base_vm_count = 0;
    std::size_t duplication_vm_count = 0;
    std::vector<SlackRecord> slacking;
    std::vector<DuplicationRecord> duplications;
};

/// Precedence, non-overlap, duration and lease checks; empty when consistent.
std::vector<std::string> verify_schedule(const Schedule& schedule, const WorkflowDag& dag,
                                         const InstanceCatalog& catalog);

/// Outcome of a VM selection: an existing VM, or a new VM of `new_type`.
struct VmChoice {
    std::optional<std::size_t> vm;
    std::size_t new_type = 0;
    double start_s = 0.0;
    double finish_s = 0.0;
};

/// Incremental schedule construction shared by every algorithm. Exposed so the
/// individual policies (VM selection, duplication, merging) can be driven and
/// tested in isolation.
class ScheduleBuilder {
public:
    ScheduleBuilder(const WorkflowDag& dag, const InstanceCatalog& catalog, Algorithm algorithm,
                    ProvisionPlan plan, SchedulerOptions options = {},
                    std::optional<SubDeadlines> deadlines = std::nullopt);

    const Ranking& ranking() const { return ranking_; }
    const ProvisionPlan& plan() const { return plan_; }

    std::size_t vm_count() const { return vms_.size(); }
    std::size_t base_vm_count() const { return base_vms_; }
    const InstanceType& vm_type(std::size_t vm) const;
    bool placed(TaskIndex t) const { return placed_[t]; }
    std::optional<std::size_t> pinned_vm(TaskIndex t) const { return pinned_[t]; }
    const Execution& execution(TaskIndex t) const { return tasks_[t]; }

    /// Time all inputs of `t` are available on `vm`, or on a fresh VM when empty.
    double data_ready(TaskIndex t, std::optional<std::size_t> vm,
                      bool ignore_duplicates_on_vm = false) const;
    /// First start >= ready at which `duration` fits between busy intervals.
    double earliest_slot(std::size_t vm, double ready, double duration) const;
    /// Earliest start on a VM requested now (provisioning is anticipatory).
    double fresh_vm_start(TaskIndex t) const;

    std::size_t provision(std::size_t type_index, double first_start_s, VmRole role);
    /// Provisions when the choice asks for a new VM; returns the VM id.
    std::size_t commit(const VmChoice& choice, VmRole role = VmRole::Base);

    VmChoice select_vm_smwso(TaskIndex t) const;
    VmChoice select_vm_smwsh(TaskIndex t) const;
    VmChoice select_vm_heft(TaskIndex t) const;

    /// Places `t` at its earliest slot on `vm` at full utilization.
    const Execution& assign(TaskIndex t, std::size_t vm);

    /// Entry-task duplication policy for an entry task that was just placed.
    void duplicate_entry(TaskIndex entry);

    /// If `head` starts a merged pipeline, places its whole subgroup on one VM
    /// and returns true.
    bool merge_and_slack(TaskIndex head);

    /// Runs the selected algorithm over the rank order.
    void run();

    Schedule finish() &&;

private:
    struct Copy {
        std::size_t vm;
        double finish_s;
        bool duplicate;
    };
    struct Interval {
        double start_s;
        double finish_s;
    };
    struct VmState {
        std::size_t type_index;
        double lease_start_s;
        double available_s;
        VmRole role;
        std::vector<Interval> busy;  // sorted by start
    };
    struct PipelineRef {
        std::size_t group;
        std::size_t pipeline;
        std::size_t subgroup;
    };

    void place(const Execution& e);
    VmChoice select(TaskIndex t) const;
    void place_pinned(TaskIndex t);
    double exec_time(TaskIndex t, std::size_t vm) const;

    const WorkflowDag& dag_;
    const InstanceCatalog& catalog_;
    Algorithm algorithm_;
    ProvisionPlan plan_;
    SchedulerOptions options_;
    std::optional<SubDeadlines> deadlines_;
    Ranking ranking_;

    std::vector<VmState> vms_;
    std::size_t base_vms_ = 0;
    std::size_t dup_vms_ = 0;
    std::vector<Execution> tasks_;
    std::vector<bool> placed_;
    std::vector<Execution> duplicates_;
    std::vector<std::vector<Copy>> copies_;
    std::vector<std::optional<std::size_t>> pinned_;
    std::vector<std::optional<std::size_t>> pending_dup_;  // index into duplications_
    long duplications_left_ = 0;

    std::vector<PipelineGroup> groups_;
    std::vector<std::optional<PipelineRef>> head_of_;

    std::vector<SlackRecord> slacking_;
    std::vector<DuplicationRecord> duplications_;
};

Schedule schedule_smwso(const WorkflowDag& dag, const InstanceCatalog& catalog,
                        const QosConstraints& qos, const SchedulerOptions& options = {});
Schedule schedule_smwsh(const WorkflowDag& dag, const InstanceCatalog& catalog,
                        const QosConstraints& qos, const SchedulerOptions& options = {});
/// Insertion-based EFT over a fixed pool leased at time zero; by default one VM
/// per catalog type.
Schedule schedule_heft(const WorkflowDag& dag, const InstanceCatalog& catalog,
                       const QosConstraints& qos, std::vector<std::size_t> pool_types = {});

Schedule run_algorithm(Algorithm algo, const WorkflowDag& dag, const InstanceCatalog& catalog,
                       const QosConstraints& qos, const SchedulerOptions& options = {});

}  // namespace wfsched
