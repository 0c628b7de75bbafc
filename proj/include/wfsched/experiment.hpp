#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wfsched/cloud.hpp"
#include "wfsched/generator.hpp"
#include "wfsched/scheduler.hpp"
#include "wfsched/simulator.hpp"
#include "wfsched/stats.hpp"

namespace wfsched {

/// deadline = alpha * FS, budget = beta * LB.
QosConstraints qos_from_factors(const WorkflowDag& dag, const InstanceCatalog& catalog, double alpha,
                                double beta);

struct RunOutput {
    Schedule schedule;
    ExecutionTrace trace;
};

RunOutput run_once(Algorithm algo, const WorkflowDag& dag, const InstanceCatalog& catalog,
                   const QosConstraints& qos, const SchedulerOptions& options = {});

struct SweepConfig {
    std::vector<Family> families = all_families();
    std::vector<std::size_t> sizes{50, 100};
    std::vector<double> alphas{4, 8, 12, 16};
    std::vector<double> betas{4, 8, 12, 16};
    std::size_t repetitions = 3;
    std::uint64_t base_seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::Smwso, Algorithm::Smwsh, Algorithm::Heft};
    std::string catalog_path;  // empty: built-in EC2 table
    std::string output_dir = ".";
    std::size_t jobs = 1;
    SchedulerOptions scheduler;
    GeneratorSpec generator;  // family, size and seed are overwritten per cell

    /// The full grid: sizes {50,100,200,500,1000}, 30 repetitions.
    void use_full_grid();
};

/// Throws std::invalid_argument describing the first problem.
void validate(const SweepConfig& config);

/// Independent per-cell seed from (base seed, family, size, repetition).
std::uint64_t derive_seed(std::uint64_t base_seed, Family family, std::size_t size, std::size_t repetition);

struct SweepFailure {
    std::string algorithm;
    std::string family;
    std::size_t size = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::string message;
};

struct SweepOutcome {
    std::vector<RunResult> results;  // deterministic order
    std::vector<SweepFailure> failures;
};

SweepOutcome run_sweep(const SweepConfig& config, const InstanceCatalog& catalog);

// ---------------------------------------------------------------------------
// Statistics over a results table

struct CellReport {
    std::string family;
    std::size_t size = 0;
    std::vector<GroupSummary> energy;                   // one per algorithm, sorted by label
    std::vector<std::pair<std::string, double>> success_rate;
    std::optional<AnovaResult> anova;
    std::optional<TukeyResult> tukey;
    std::string notice;  // why the ANOVA was skipped, if it was
};

struct StatsReport {
    std::vector<CellReport> cells;
    std::vector<std::pair<std::string, double>> overall_success_rate;
    /// ANOVA of per-cell success rates across algorithms.
    std::vector<GroupSummary> success_groups;
    std::optional<AnovaResult> success_anova;
    std::string success_notice;
};

StatsReport build_stats_report(const std::vector<RunResult>& results);
nlohmann::json report_to_json(const StatsReport& report);
/// ANOVA/Tukey per cell, then the energy ranking table (rows: family and size,
/// columns: algorithms) and the success-rate table.
void write_report_text(std::ostream& out, const StatsReport& report);

}  // namespace wfsched
