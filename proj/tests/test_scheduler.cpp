#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "support.hpp"
#include "wfsched/experiment.hpp"
#include "wfsched/generator.hpp"

using namespace wfsched;
using namespace wfsched::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const InstanceCatalog& ec2() {
    static const InstanceCatalog c = InstanceCatalog::ec2_default();
    return c;
}

WorkflowDag chain(double a, double b, double mb) { return make_dag({{"A", a}, {"B", b}}, {{"A", "B", mb}}); }

// pre -> src -> {long 100, mid 40, short 20} -> sink, no data
WorkflowDag three_pipes() {
    return make_dag({{"a_pre", 1}, {"b_src", 1}, {"c_long", 100}, {"d_mid", 40}, {"e_short", 20}, {"f_sink", 1}},
                    {{"a_pre", "b_src", 0},
                     {"b_src", "c_long", 0},
                     {"b_src", "d_mid", 0},
                     {"b_src", "e_short", 0},
                     {"c_long", "f_sink", 0},
                     {"d_mid", "f_sink", 0},
                     {"e_short", "f_sink", 0}});
}

// Single entry fanning out to six single-parent children.
WorkflowDag fan6(double mb) {
    std::vector<Task> tasks{{"e", 40}};
    std::vector<Edge> edges;
    for (int i = 1; i <= 6; ++i) {
        tasks.push_back({"c" + std::to_string(i), 40});
        edges.push_back({"e", "c" + std::to_string(i), mb});
        edges.push_back({"c" + std::to_string(i), "z", 0});
    }
    tasks.push_back({"z", 40});
    return make_dag(tasks, edges);
}

double makespan(const Schedule& s) {
    double m = 0;
    for (const auto& e : s.tasks) m = std::max(m, e.finish_s);
    return m;
}

std::size_t distinct_types(const Schedule& s) {
    std::set<std::string> names;
    for (const auto& vm : s.vms) names.insert(vm.type.name);
    return names.size();
}

// Best makespan over every task-to-VM mapping, each VM running its tasks in
// index order (indices are topological in the fixtures used).
double brute_force_makespan(const WorkflowDag& dag, const InstanceCatalog& cat, const std::vector<std::size_t>& pool) {
    const std::size_t n = dag.size(), m = pool.size();
    std::vector<std::size_t> map(n, 0);
    double best = kInf;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            std::vector<double> free(m, cat.provisioning_delay_s()), fin(n, 0);
            for (TaskIndex t = 0; t < n; ++t) {
                double s = free[map[t]];
                for (const auto& p : dag.parents(t)) {
                    s = std::max(s, fin[p.task] + tt(p.data_mb, map[p.task] == map[t], cat.bandwidth_mbps()));
                }
                fin[t] = s + et(dag.task(t).weight_mi, cat[pool[map[t]]]);
                free[map[t]] = fin[t];
            }
            best = std::min(best, *std::max_element(fin.begin(), fin.end()));
            return;
        }
        for (std::size_t v = 0; v < m; ++v) {
            map[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return best;
}

std::vector<WorkflowDag> generated_sample(std::size_t per_family, std::size_t size) {
    std::vector<WorkflowDag> out;
    for (Family f : all_families()) {
        for (std::uint64_t seed = 0; seed < per_family; ++seed) out.push_back(generate({f, size, seed + 100}));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Estimates

TEST(EstEft, ChainWithTransfer) {
    auto t = est_eft(chain(10, 20, 40), 2.0, 20.0);
    EXPECT_EQ(t.est, (std::vector<double>{0, 7}));
    EXPECT_EQ(t.eft, (std::vector<double>{5, 17}));
    EXPECT_DOUBLE_EQ(t.min_makespan_s, 17.0);
}

TEST(EstEft, SingleTask) {
    auto t = est_eft(make_dag({{"A", 10}}), 2.0, 20.0);
    EXPECT_DOUBLE_EQ(t.est[0], 0.0);
    EXPECT_DOUBLE_EQ(t.eft[0], 5.0);
}

TEST(EstEft, SymmetricDiamondBranchesShareEst) {
    auto dag = make_dag({{"A", 10}, {"B", 8}, {"C", 8}, {"D", 10}},
                        {{"A", "B", 20}, {"A", "C", 20}, {"B", "D", 0}, {"C", "D", 0}});
    auto t = est_eft(dag, 2.0, 20.0);
    EXPECT_DOUBLE_EQ(t.est[1], t.est[2]);
}

TEST(EstEft, MatchesPathEnumeration) {
    for (std::size_t n = 1; n <= 5; ++n) {
        for (const auto& dag : enumerate_small_dags(n)) {
            auto got = est_eft(dag, 2.0, 20.0);
            auto want = oracle_est_eft(dag, 2.0, 20.0);
            ASSERT_EQ(got.est, want.est);
            ASSERT_EQ(got.eft, want.eft);
        }
    }
}

TEST(Onvm, Examples) {
    const std::size_t table[] = {4, 6, 1, 1, 4, 1, 1, 1, 1};
    EXPECT_EQ(onvm(width_profile(std::span<const std::size_t>(table))), 4u);
    const std::size_t skewed[] = {1, 1, 1, 9};
    EXPECT_EQ(onvm(width_profile(std::span<const std::size_t>(skewed))), 3u);
    EXPECT_EQ(onvm(width_profile(make_dag({{"A", 1}}))), 1u);
    EXPECT_EQ(onvm(width_profile(montage20())), 4u);
}

TEST(Onvm, NeverExceedsMaxWidth) {
    for (const auto& dag : generated_sample(6, 90)) {
        auto p = width_profile(dag);
        EXPECT_GE(onvm(p), 1u);
        EXPECT_LE(onvm(p), p.max_width);
    }
}

TEST(EstimateMakespan, Examples) {
    const InstanceType one{"one", 1, 1, 1, 2}, two{"two", 2, 1, 1, 2};
    auto dag = chain(10, 10, 100);  // TT = 5 at 20 MB/s
    EXPECT_DOUBLE_EQ(estimate_makespan(dag, one, 1, 20), 25.0);
    EXPECT_DOUBLE_EQ(estimate_makespan(dag, one, 2, 20), 12.5);
    EXPECT_DOUBLE_EQ(estimate_makespan(make_dag({{"A", 10}}), two, 1, 20), 5.0);
}

TEST(OptimalType, BudgetSliceLimitsToMidRange) {
    auto dag = make_dag({{"A", 7200}});
    const QosConstraints qos{kInf, 0.15};
    // scan: fastest type that meets both constraints
    std::size_t want = 0;
    for (std::size_t k = 0; k < ec2().size(); ++k) {
        const double m = 7200 / ec2()[k].mips;
        if (m <= qos.deadline_s && std::ceil(m / 3600) * ec2()[k].cost_per_period <= qos.budget) want = k;
    }
    EXPECT_EQ(ec2()[want].name, "m4.large");
    EXPECT_EQ(optimal_instance_type(dag, ec2(), qos, 1), want);
}

TEST(OptimalType, UnconstrainedPicksFastest) {
    EXPECT_EQ(optimal_instance_type(make_dag({{"A", 7200}}), ec2(), {kInf, kInf}, 1), ec2().size() - 1);
}

TEST(OptimalType, Fallbacks) {
    auto dag = make_dag({{"A", 7200}});
    // nothing meets a 1 s deadline -> fastest within the budget slice
    EXPECT_EQ(ec2()[optimal_instance_type(dag, ec2(), {1, 0.15}, 1)].name, "m4.large");
    // nothing meets either -> cheapest
    EXPECT_EQ(optimal_instance_type(dag, ec2(), {1, 0.01}, 1), 0u);
}

TEST(OptimalType, BudgetIsSlicedPerVm) {
    auto dag = make_dag({{"A", 7200}});
    // 0.30 over 2 VMs leaves 0.15 each (and the estimate halves)
    EXPECT_EQ(ec2()[optimal_instance_type(dag, ec2(), {kInf, 0.30}, 2)].name, "m4.large");
    EXPECT_EQ(ec2()[optimal_instance_type(dag, ec2(), {kInf, 0.30}, 1)].name, "m4.xlarge");
    EXPECT_EQ(ec2()[optimal_instance_type(dag, ec2(), {kInf, 0.20}, 2)].name, "m4.large");
}

TEST(DeadlineDistribution, TightDeadlineIsEftOnOptType) {
    auto dag = chain(10, 20, 0);
    auto d = distribute_deadline(dag, tiny_catalog(), 0, {30, 1});
    EXPECT_EQ(d.scaled, (std::vector<double>{10, 30}));
    EXPECT_EQ(d.per_task, d.scaled);
    EXPECT_DOUBLE_EQ(d.spare_total, 0.0);
    EXPECT_FALSE(d.below_lower_bound);
}

TEST(DeadlineDistribution, DoubledDeadlineDoubles) {
    auto d = distribute_deadline(chain(10, 20, 0), tiny_catalog(), 0, {60, 1});
    EXPECT_EQ(d.scaled, (std::vector<double>{20, 60}));
    EXPECT_DOUBLE_EQ(d.spare_total, 0.0);
}

// With the exit task scaled to exactly the deadline, nothing is left over to
// spread; the extra 10 s is absorbed proportionally by the scaling instead.
TEST(DeadlineDistribution, ExtraTimeIsAbsorbedByScaling) {
    auto d = distribute_deadline(chain(10, 20, 0), tiny_catalog(), 0, {40, 1});
    EXPECT_DOUBLE_EQ(d.spare_total, 0.0);
    EXPECT_NEAR(d.per_task[0], 40.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(d.per_task[1], 40.0);
}

TEST(DeadlineDistribution, BelowLowerBoundIsFlagged) {
    auto d = distribute_deadline(chain(10, 20, 0), tiny_catalog(), 0, {20, 1});
    EXPECT_TRUE(d.below_lower_bound);
}

TEST(DeadlineDistribution, ExitWithinDeadlineAndMonotone) {
    for (const auto& dag : generated_sample(4, 70)) {
        const auto qos = qos_from_factors(dag, ec2(), 8, 8);
        const auto plan = make_provision_plan(dag, ec2(), qos);
        const auto d = distribute_deadline(dag, ec2(), plan.opt_type_index, qos);
        for (TaskIndex t = 0; t < dag.size(); ++t) {
            EXPECT_GE(d.per_task[t], d.scaled[t]);
            if (dag.is_exit(t)) EXPECT_LE(d.per_task[t], qos.deadline_s * (1 + 1e-9));
            for (const auto& c : dag.children(t)) EXPECT_LE(d.per_task[t], d.per_task[c.task]);
        }
    }
}

TEST(RankU, SingleTask) {
    auto r = rank_u(make_dag({{"A", 96}}), tiny_catalog());
    EXPECT_DOUBLE_EQ(r.inputs[0].sigma, 24.0);
    EXPECT_DOUBLE_EQ(r.rank[0], 24.0);
}

TEST(RankU, ExitTaskHasOnlySigma) {
    auto dag = chain(96, 96, 40);
    auto r = rank_u(dag, tiny_catalog());
    EXPECT_DOUBLE_EQ(r.rank[1], r.inputs[1].sigma);
    EXPECT_DOUBLE_EQ(r.inputs[1].avg_occw, 0.0);
    EXPECT_EQ(r.inputs[1].outdegree, 0u);
}

TEST(RankU, ChainWithOneType) {
    auto r = rank_u(chain(10, 10, 100), single_type_catalog());
    EXPECT_DOUBLE_EQ(r.rank[1], 0.0);
    EXPECT_DOUBLE_EQ(r.rank[0], 6.0);
}

TEST(RankU, OrderIsTopological) {
    for (const auto& dag : generated_sample(6, 80)) {
        auto r = rank_u(dag, ec2());
        for (TaskIndex t = 0; t < dag.size(); ++t) {
            for (const auto& c : dag.children(t)) {
                EXPECT_GT(r.rank[t], r.rank[c.task]);
                EXPECT_LT(r.position[t], r.position[c.task]);
            }
        }
    }
}

TEST(FsLb, Examples) {
    EXPECT_DOUBLE_EQ(fs_lb(chain(10, 20, 0), ec2()).fastest_schedule_s, 0.3125);
    EXPECT_NEAR(fs_lb(make_dag({{"A", 3600}}), ec2()).lowest_budget, 0.067, 1e-12);
    auto diamond = make_dag({{"A", 96}, {"B", 192}, {"C", 96}, {"D", 96}},
                            {{"A", "B", 0}, {"A", "C", 0}, {"B", "D", 0}, {"C", "D", 0}});
    EXPECT_DOUBLE_EQ(fs_lb(diamond, ec2()).fastest_schedule_s, 4.0);
}

// ---------------------------------------------------------------------------
// VM selection

TEST(SelectSmwso, FirstTaskProvisions) {
    auto dag = make_dag({{"A", 10}});
    auto s = schedule_smwso(dag, tiny_catalog(), {kInf, kInf});
    ASSERT_EQ(s.vms.size(), 1u);
    EXPECT_DOUBLE_EQ(s.tasks[0].start_s, 100.0);
    EXPECT_DOUBLE_EQ(makespan(s), 100.0 + et(10, s.plan->opt_instance));
    EXPECT_DOUBLE_EQ(s.vms[0].lease_start_s, 0.0);
}

TEST(SelectSmwso, CapOfOneSerializes) {
    auto dag = make_dag({{"A", 10}, {"B", 10}});
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {kInf, kInf});
    plan.opt_vm_count = 1;
    ScheduleBuilder b(dag, cat, Algorithm::Smwso, plan);
    b.run();
    auto s = std::move(b).finish();
    ASSERT_EQ(s.vms.size(), 1u);
    EXPECT_DOUBLE_EQ(s.tasks[1].start_s, s.tasks[0].finish_s);
}

TEST(SelectSmwso, SecondVmWhenWaitingIsWorse) {
    auto dag = make_dag({{"A", 10}, {"B", 10}});
    auto s = schedule_smwso(dag, tiny_catalog(), {kInf, kInf});
    ASSERT_EQ(s.plan->opt_vm_count, 2u);
    ASSERT_EQ(s.vms.size(), 2u);
    EXPECT_DOUBLE_EQ(s.tasks[0].start_s, 100.0);
    EXPECT_DOUBLE_EQ(s.tasks[1].start_s, 100.0);
}

TEST(SelectSmwso, ReusesWhenNoWait) {
    // B depends on A; waiting on A's VM costs nothing, so no new VM.
    auto dag = make_dag({{"A", 10}, {"B", 10}, {"C", 10}}, {{"A", "B", 0}});
    auto s = schedule_smwso(dag, tiny_catalog(), {kInf, kInf});
    EXPECT_EQ(s.tasks[0].vm, s.tasks[1].vm);
}

TEST(SelectSmwsh, GenerousDeadlineTakesCheapestType) {
    auto dag = make_dag({{"A", 40}, {"B", 40}});
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {1e6, 1e6});
    SubDeadlines d;
    d.per_task = {1e6, 1e6};
    ScheduleBuilder b(dag, cat, Algorithm::Smwsh, plan, {}, d);
    auto c = b.select_vm_smwsh(1);
    // the initial VM can start B at once, so it is reused
    ASSERT_TRUE(c.vm.has_value());
    b.assign(0, b.commit(b.select_vm_smwsh(0)));
    auto c2 = b.select_vm_smwsh(1);
    ASSERT_FALSE(c2.vm.has_value());
    EXPECT_EQ(c2.new_type, 0u);
}

TEST(SelectSmwsh, TightDeadlineFallsBackToFastest) {
    auto dag = make_dag({{"A", 40}, {"B", 40}});
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {1e6, 1e6});
    SubDeadlines d;
    d.per_task = {1, 1};
    ScheduleBuilder b(dag, cat, Algorithm::Smwsh, plan, {}, d);
    b.assign(0, 0);
    auto c = b.select_vm_smwsh(1);
    ASSERT_FALSE(c.vm.has_value());
    EXPECT_EQ(c.new_type, cat.size() - 1);
}

TEST(SelectSmwsh, CapReachedReusesSmallestFinish) {
    auto dag = make_dag({{"A", 40}, {"B", 40}});
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {1e6, 1e6});
    plan.opt_vm_count = 1;
    SubDeadlines d;
    d.per_task = {1, 1};
    ScheduleBuilder b(dag, cat, Algorithm::Smwsh, plan, {}, d);
    b.assign(0, 0);
    auto c = b.select_vm_smwsh(1);
    ASSERT_TRUE(c.vm.has_value());
    EXPECT_EQ(*c.vm, 0u);
    EXPECT_GT(c.finish_s, d.per_task[1]);
}

TEST(Smwsh, SingleTaskUsesInitialVm) {
    auto s = schedule_smwsh(make_dag({{"A", 40}}), tiny_catalog(), {1e6, 1e6});
    ASSERT_EQ(s.vms.size(), 1u);
    EXPECT_EQ(s.vms[0].type.name, s.plan->opt_instance.name);
}

TEST(Smwsh, SubDeadlinesCanForceMixedTypes) {
    // The budget slice only admits the slow type; B's scaled sub-deadline is
    // too short for a slow VM, so it gets a fast one.
    auto dag = make_dag({{"A", 200}, {"B", 100}});
    auto cat = tiny_catalog();
    const QosConstraints qos{350, 2.0};
    auto s = schedule_smwsh(dag, cat, qos);
    EXPECT_EQ(s.plan->opt_type_index, 0u);
    EXPECT_GE(distinct_types(s), 2u);
    EXPECT_TRUE(verify_schedule(s, dag, cat).empty());
}

// ---------------------------------------------------------------------------
// Duplication

TEST(Duplication, FanOutWithRoomDuplicatesThreeTimes) {
    auto dag = fan6(40);
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {kInf, kInf});
    plan.opt_vm_count = 4;  // min(4, 6) - 1 = 3 copies due
    ScheduleBuilder b(dag, cat, Algorithm::Smwso, plan);
    b.run();
    auto s = std::move(b).finish();
    EXPECT_EQ(s.duplications.size(), 3u);
    EXPECT_EQ(s.duplicates.size(), 3u);
    EXPECT_EQ(s.duplication_vm_count, 3u);
    for (const auto& r : s.duplications) {
        EXPECT_LE(r.ast_with_s, r.ast_without_s);
        EXPECT_EQ(s.tasks[r.child].vm, r.vm);
    }
    for (const auto& vm : s.vms) EXPECT_EQ(vm.type.name, s.plan->opt_instance.name);
    EXPECT_TRUE(verify_schedule(s, dag, cat).empty());
}

TEST(Duplication, GateClosedOnMontageTwenty) {
    auto dag = montage20();
    auto s = schedule_smwso(dag, tiny_catalog(), {kInf, kInf});
    EXPECT_EQ(s.plan->opt_vm_count, 4u);
    EXPECT_TRUE(s.duplicates.empty());
}

TEST(Duplication, NeverForMultiParentChildren) {
    auto dag = make_dag({{"e1", 40}, {"e2", 40}, {"j", 40}, {"k1", 40}, {"k2", 40}, {"k3", 40}},
                        {{"e1", "j", 40}, {"e2", "j", 40}, {"e1", "k1", 40}, {"e1", "k2", 40}, {"e1", "k3", 40}});
    auto cat = tiny_catalog();
    auto plan = make_provision_plan(dag, cat, {kInf, kInf});
    plan.widths.per_level = {1, 6};  // open the gate regardless of the real widths
    plan.opt_vm_count = 6;
    ScheduleBuilder b(dag, cat, Algorithm::Smwso, plan);
    b.run();
    auto s = std::move(b).finish();
    EXPECT_FALSE(s.duplications.empty());
    for (const auto& r : s.duplications) EXPECT_NE(dag.task(r.child).id, "j");
    EXPECT_TRUE(verify_schedule(s, dag, cat).empty());
}

TEST(Duplication, NotWithoutTransfer) {
    // zero data: a copy can never beat the original plus transfer
    auto s = schedule_smwso(fan6(0), tiny_catalog(), {kInf, kInf});
    EXPECT_TRUE(s.duplicates.empty());
}

TEST(Duplication, SmwshUsesCheapestFittingType) {
    auto dag = fan6(800);  // 40 s transfers make even the slow type worth it
    auto cat = tiny_catalog();
    const QosConstraints qos{1e6, 1e6};
    auto plan = make_provision_plan(dag, cat, qos);
    plan.opt_vm_count = 4;
    ScheduleBuilder b(dag, cat, Algorithm::Smwsh, plan, {}, distribute_deadline(dag, cat, plan.opt_type_index, qos));
    b.run();
    auto s = std::move(b).finish();
    ASSERT_FALSE(s.duplications.empty());
    for (const auto& r : s.duplications) {
        const auto& vm = s.vms[r.vm];
        if (s.vm_roles[r.vm] == VmRole::Duplication) EXPECT_EQ(vm.type.name, "slow");
    }
}

// ---------------------------------------------------------------------------
// Pipeline merging

TEST(Slacking, NormalizedStretchesToLongest) {
    auto dag = three_pipes();
    auto cat = single_type_catalog();
    auto s = schedule_smwso(dag, cat, {kInf, kInf});
    ASSERT_EQ(s.plan->opt_vm_count, 2u);
    const SlackRecord* rec = nullptr;
    for (const auto& r : s.slacking) {
        if (r.tasks.size() == 2) rec = &r;
    }
    ASSERT_NE(rec, nullptr);
    EXPECT_DOUBLE_EQ(rec->sum_s, 60.0);
    EXPECT_DOUBLE_EQ(rec->utilization, 0.6);
    EXPECT_NEAR(rec->target_span_s, 100.0, 1e-9);
    EXPECT_NEAR(s.tasks[dag.index_of("e_short")].finish_s, s.tasks[dag.index_of("c_long")].finish_s, 1e-9);
    EXPECT_TRUE(verify_schedule(s, dag, cat).empty());
}

TEST(Slacking, RatioModeFormula) {
    SchedulerOptions o;
    o.slack_mode = SlackMode::Ratio;
    auto s = schedule_smwso(three_pipes(), single_type_catalog(), {kInf, kInf}, o);
    bool found = false;
    for (const auto& r : s.slacking) {
        if (r.tasks.size() == 2) {
            EXPECT_NEAR(r.utilization, 100.0 / 140.0, 1e-12);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(Slacking, LongestAloneRunsAtFullSpeed) {
    auto dag = three_pipes();
    auto s = schedule_smwso(dag, single_type_catalog(), {kInf, kInf});
    for (const auto& r : s.slacking) {
        if (r.tasks.size() == 1) EXPECT_DOUBLE_EQ(r.utilization, 1.0);
    }
    EXPECT_DOUBLE_EQ(s.tasks[dag.index_of("c_long")].utilization, 1.0);
}

TEST(Slacking, OffKeepsMergingAtFullSpeed) {
    SchedulerOptions o;
    o.slacking = false;
    auto dag = three_pipes();
    auto s = schedule_smwso(dag, single_type_catalog(), {kInf, kInf}, o);
    EXPECT_EQ(s.tasks[dag.index_of("d_mid")].vm, s.tasks[dag.index_of("e_short")].vm);
    for (const auto& e : s.tasks) EXPECT_DOUBLE_EQ(e.utilization, 1.0);
}

TEST(Slacking, MergingOffPlacesIndividually) {
    SchedulerOptions o;
    o.pipeline_merging = false;
    auto s = schedule_smwso(three_pipes(), single_type_catalog(), {kInf, kInf}, o);
    EXPECT_TRUE(s.slacking.empty());
}

// ---------------------------------------------------------------------------
// HEFT

TEST(Heft, SingleTaskOnFastest) {
    auto s = schedule_heft(make_dag({{"A", 40}}), tiny_catalog(), {kInf, kInf});
    ASSERT_EQ(s.vms.size(), 1u);
    EXPECT_EQ(s.vms[0].type.name, "fast");
}

TEST(Heft, ChainStaysOnFastest) {
    auto dag = make_dag({{"A", 40}, {"B", 60}, {"C", 20}}, {{"A", "B", 20}, {"B", "C", 40}});
    auto cat = tiny_catalog();
    auto s = schedule_heft(dag, cat, {kInf, kInf});
    for (const auto& e : s.tasks) EXPECT_EQ(s.vms[e.vm].type.name, "fast");
    EXPECT_DOUBLE_EQ(makespan(s), brute_force_makespan(dag, cat, {0, 1}));
}

TEST(Heft, IndependentTasksMatchBruteForce) {
    auto cat = tiny_catalog();
    for (auto weights : std::vector<std::vector<double>>{{40, 40}, {40, 80}, {80, 40, 40}, {20, 20, 20}}) {
        std::vector<Task> tasks;
        for (std::size_t i = 0; i < weights.size(); ++i) tasks.push_back({std::string(1, char('A' + i)), weights[i]});
        auto dag = make_dag(tasks);
        auto s = schedule_heft(dag, cat, {kInf, kInf});
        EXPECT_DOUBLE_EQ(makespan(s), brute_force_makespan(dag, cat, {0, 1}));
    }
}

TEST(Heft, CustomPool) {
    auto dag = make_dag({{"A", 40}, {"B", 40}});
    auto s = schedule_heft(dag, tiny_catalog(), {kInf, kInf}, {1, 1});
    EXPECT_EQ(s.vms.size(), 2u);
    EXPECT_THROW(schedule_heft(dag, tiny_catalog(), {kInf, kInf}, {5}), std::out_of_range);
}

// ---------------------------------------------------------------------------
// Properties over generated workflows

class AllAlgorithms : public ::testing::TestWithParam<Algorithm> {};

TEST_P(AllAlgorithms, SchedulesAreConsistent) {
    for (const auto& dag : generated_sample(4, 60)) {
        for (double f : {2.0, 16.0}) {
            const auto qos = qos_from_factors(dag, ec2(), f, f);
            const auto s = run_algorithm(GetParam(), dag, ec2(), qos);
            const auto problems = verify_schedule(s, dag, ec2());
            ASSERT_TRUE(problems.empty()) << problems.front();
            if (GetParam() == Algorithm::Heft) continue;
            EXPECT_LE(s.base_vm_count, s.plan->opt_vm_count);
            EXPECT_LE(s.plan->opt_vm_count, s.plan->widths.max_width);
            for (const auto& r : s.duplications) EXPECT_LE(r.ast_with_s, r.ast_without_s + 1e-9);
            for (const auto& r : s.slacking) EXPECT_LE(r.target_span_s, r.longest_same_speed_s + 1e-6);
            if (GetParam() == Algorithm::Smwso) {
                for (const auto& vm : s.vms) EXPECT_EQ(vm.type.name, s.plan->opt_instance.name);
            }
        }
    }
}

TEST_P(AllAlgorithms, Deterministic) {
    auto dag = generate({Family::Sipht, 80, 7});
    const auto qos = qos_from_factors(dag, ec2(), 8, 8);
    const auto a = run_algorithm(GetParam(), dag, ec2(), qos);
    const auto b = run_algorithm(GetParam(), dag, ec2(), qos);
    ASSERT_EQ(a.tasks.size(), b.tasks.size());
    for (std::size_t i = 0; i < a.tasks.size(); ++i) {
        EXPECT_EQ(a.tasks[i].vm, b.tasks[i].vm);
        EXPECT_EQ(a.tasks[i].start_s, b.tasks[i].start_s);
        EXPECT_EQ(a.tasks[i].finish_s, b.tasks[i].finish_s);
        EXPECT_EQ(a.tasks[i].utilization, b.tasks[i].utilization);
    }
    EXPECT_EQ(a.vms.size(), b.vms.size());
}

INSTANTIATE_TEST_SUITE_P(Scheduler, AllAlgorithms,
                         ::testing::Values(Algorithm::Smwso, Algorithm::Smwsh, Algorithm::Heft),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Verify, CatchesOverlapAndPrecedence) {
    auto dag = chain(40, 40, 20);
    auto cat = tiny_catalog();
    auto s = schedule_smwso(dag, cat, {kInf, kInf});
    ASSERT_TRUE(verify_schedule(s, dag, cat).empty());
    auto bad = s;
    bad.tasks[1].start_s = bad.tasks[0].start_s;
    bad.tasks[1].finish_s = bad.tasks[1].start_s + et(40, bad.vms[bad.tasks[1].vm].type);
    EXPECT_FALSE(verify_schedule(bad, dag, cat).empty());
    auto short_run = s;
    short_run.tasks[0].finish_s -= 1;
    EXPECT_FALSE(verify_schedule(short_run, dag, cat).empty());
}

TEST(Algorithms, ParseAndName) {
    EXPECT_EQ(parse_algorithm("SMWSO"), Algorithm::Smwso);
    EXPECT_EQ(parse_algorithm("heft"), Algorithm::Heft);
    EXPECT_EQ(to_string(Algorithm::Smwsh), "smwsh");
    EXPECT_THROW(parse_algorithm("reews"), std::invalid_argument);
}
