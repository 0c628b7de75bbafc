#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support.hpp"
#include "wfsched/experiment.hpp"

using namespace wfsched;

namespace {

const InstanceCatalog& ec2() {
    static const InstanceCatalog c = InstanceCatalog::ec2_default();
    return c;
}

SweepConfig small_config() {
    SweepConfig c;
    c.families = {Family::Montage, Family::Ligo};
    c.sizes = {30};
    c.alphas = {4, 16};
    c.betas = {8};
    c.repetitions = 2;
    c.base_seed = 9;
    return c;
}

std::string csv_of(const SweepOutcome& o) {
    std::ostringstream out;
    write_results_csv(out, o.results);
    return out.str();
}

}  // namespace

TEST(Qos, FromFactors) {
    auto dag = wfsched::testing::montage20();
    const auto b = fs_lb(dag, ec2());
    const auto q = qos_from_factors(dag, ec2(), 4, 12);
    EXPECT_DOUBLE_EQ(q.deadline_s, 4 * b.fastest_schedule_s);
    EXPECT_DOUBLE_EQ(q.budget, 12 * b.lowest_budget);
}

TEST(RunOnce, TraceMatchesSchedule) {
    auto dag = generate({Family::Epigenomics, 50, 3});
    const auto qos = qos_from_factors(dag, ec2(), 8, 8);
    for (auto algo : {Algorithm::Smwso, Algorithm::Smwsh, Algorithm::Heft}) {
        auto run = run_once(algo, dag, ec2(), qos);
        EXPECT_EQ(run.schedule.algorithm, algo);
        EXPECT_EQ(run.trace.per_task.size(), dag.size());
        EXPECT_GT(run.trace.total_energy_kwh, 0.0);
    }
}

TEST(Sweep, DefaultsAreDeskScale) {
    SweepConfig c;
    EXPECT_EQ(c.families.size(), 5u);
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{50, 100}));
    EXPECT_EQ(c.alphas.size() * c.betas.size(), 16u);
    EXPECT_EQ(c.repetitions, 3u);
    c.use_full_grid();
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{50, 100, 200, 500, 1000}));
    EXPECT_EQ(c.repetitions, 30u);
    EXPECT_NO_THROW(validate(c));
}

TEST(Sweep, Validation) {
    auto c = small_config();
    c.alphas.clear();
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = small_config();
    c.repetitions = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = small_config();
    c.sizes = {3};
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = small_config();
    c.betas = {-1};
    EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Sweep, SeedsAreIndependentPerCell) {
    std::set<std::uint64_t> seen;
    for (Family f : all_families()) {
        for (std::size_t size : {50, 100}) {
            for (std::size_t rep = 0; rep < 10; ++rep) seen.insert(derive_seed(1, f, size, rep));
        }
    }
    EXPECT_EQ(seen.size(), 100u);
    EXPECT_EQ(derive_seed(1, Family::Sipht, 50, 2), derive_seed(1, Family::Sipht, 50, 2));
    EXPECT_NE(derive_seed(1, Family::Sipht, 50, 2), derive_seed(2, Family::Sipht, 50, 2));
}

TEST(Sweep, RowCount) {
    const auto c = small_config();
    const auto o = run_sweep(c, ec2());
    EXPECT_EQ(o.results.size() + o.failures.size(),
              c.families.size() * c.sizes.size() * c.repetitions * c.alphas.size() * c.betas.size() *
                  c.algorithms.size());
    for (const auto& r : o.results) {
        EXPECT_EQ(r.success, r.cr <= 1 && r.tr <= 1);
        EXPECT_EQ(r.size, 30u);
    }
}

TEST(Sweep, SingleCellTwoAlgorithms) {
    SweepConfig c;
    c.families = {Family::CyberShake};
    c.sizes = {40};
    c.alphas = {8};
    c.betas = {8};
    c.repetitions = 1;
    c.algorithms = {Algorithm::Smwso, Algorithm::Heft};
    const auto o = run_sweep(c, ec2());
    ASSERT_EQ(o.results.size(), 2u);
    EXPECT_EQ(o.results[0].algorithm, "smwso");
    EXPECT_EQ(o.results[1].algorithm, "heft");
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
    auto c = small_config();
    const auto a = csv_of(run_sweep(c, ec2()));
    const auto b = csv_of(run_sweep(c, ec2()));
    c.jobs = 3;
    const auto threaded = csv_of(run_sweep(c, ec2()));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, threaded);
    c.base_seed = 10;
    EXPECT_NE(a, csv_of(run_sweep(c, ec2())));
}

TEST(Report, SingleAlgorithmSkipsAnova) {
    std::vector<RunResult> rs;
    for (int i = 0; i < 4; ++i) {
        RunResult r;
        r.algorithm = "smwso";
        r.family = "ligo-like";
        r.size = 50;
        r.energy_kwh = 1 + i;
        r.success = i != 0;
        rs.push_back(r);
    }
    const auto report = build_stats_report(rs);
    ASSERT_EQ(report.cells.size(), 1u);
    EXPECT_FALSE(report.cells[0].anova);
    EXPECT_FALSE(report.cells[0].notice.empty());
    ASSERT_EQ(report.overall_success_rate.size(), 1u);
    EXPECT_DOUBLE_EQ(report.overall_success_rate[0].second, 75.0);
}

// Rows whose energy column realizes the published group summaries give the
// published ANOVA, including after a CSV round trip.
TEST(Report, RealizedSummariesThroughCsv) {
    std::vector<RunResult> rs;
    const std::vector<std::tuple<std::string, double, double>> groups{
        {"reews", 93, 183.33}, {"smwso", 98, 47.92}, {"smwsh", 88.52, 311.43}};
    for (const auto& [algo, mean, var] : groups) {
        // 12 above, 12 below, one at the mean: sample variance is exactly d^2
        const double d = std::sqrt(var);
        for (int i = 0; i < 25; ++i) {
            RunResult r;
            r.algorithm = algo;
            r.family = "montage-like";
            r.size = 50;
            r.energy_kwh = i == 24 ? mean : mean + (i % 2 ? -d : d);
            rs.push_back(r);
        }
    }
    std::stringstream csv;
    write_results_csv(csv, rs);
    const auto report = build_stats_report(read_results_csv(csv));
    ASSERT_EQ(report.cells.size(), 1u);
    ASSERT_TRUE(report.cells[0].anova);
    const auto& a = *report.cells[0].anova;
    EXPECT_NEAR(a.ss_between, 1124.51, 0.5);
    EXPECT_NEAR(a.ss_within, 13024.24, 0.5);
    EXPECT_NEAR(a.f_stat, 3.11, 0.01);
    ASSERT_TRUE(report.cells[0].tukey);
    const auto json = report_to_json(report);
    EXPECT_TRUE(json["cells"][0].contains("tukey"));
    EXPECT_TRUE(json["cells"][0]["tukey"].contains("ranking"));
    std::ostringstream text;
    write_report_text(text, report);
    EXPECT_NE(text.str().find("montage-like"), std::string::npos);
    EXPECT_NE(text.str().find("smwso"), std::string::npos);
}

TEST(Report, ExternalRowsMix) {
    std::istringstream in(std::string(kResultsHeader) + "\n" +
                          "reews,montage-like,50,4,4,0,10,1,8.2,0.5,0.5,1\n"
                          "reews,montage-like,50,4,8,0,10,1,8.3,0.5,0.5,1\n"
                          "smwso,montage-like,50,4,4,0,10,1,4.5,0.5,0.5,1\n"
                          "smwso,montage-like,50,4,8,0,10,1,4.6,0.5,0.5,0\n");
    const auto report = build_stats_report(read_results_csv(in));
    ASSERT_EQ(report.cells.size(), 1u);
    ASSERT_TRUE(report.cells[0].anova);
    EXPECT_EQ(report.cells[0].energy.size(), 2u);
    ASSERT_TRUE(report.cells[0].tukey.has_value() || !report.cells[0].notice.empty());
}
