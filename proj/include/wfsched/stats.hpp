#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfsched {

struct QosConstraints;
struct ExecutionTrace;

struct RunResult {
    std::string algorithm;
    std::string family;
    std::size_t size = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    double makespan_s = 0.0;
    double cost = 0.0;
    double energy_kwh = 0.0;
    double cr = 0.0;
    double tr = 0.0;
    bool success = false;
};

struct Ratios {
    double cr = 0.0;
    double tr = 0.0;
    bool success = false;  // CR <= 1 and TR <= 1
};

Ratios ratios(double cost, double makespan_s, const QosConstraints& qos);
Ratios ratios(const ExecutionTrace& trace, const QosConstraints& qos);

/// Percentage of successful runs; throws std::invalid_argument when empty.
double success_rate(std::span<const RunResult> results);
double success_rate(std::span<const bool> successes);

struct GroupSummary {
    std::string label;
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample (n-1) form
};

GroupSummary summarize(std::string label, std::span<const double> samples);

struct AnovaResult {
    double ss_between = 0.0;
    double ss_within = 0.0;
    double ss_total = 0.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double ms_between = 0.0;
    double ms_within = 0.0;
    double f_stat = 0.0;
    double f_critical = 0.0;
    double p_value = 1.0;
    bool significant = false;  // f_stat >= f_critical
};

class StatsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One-way ANOVA from group summaries. Needs >= 2 groups with n >= 2 each.
AnovaResult anova(std::span<const GroupSummary> groups, double alpha = 0.05);

/// Upper-tail F quantile and survival function.
double f_critical(double alpha, double df1, double df2);
double f_p_value(double f, double df1, double df2);

/// Studentized range upper 5% point for k in [2,10] groups and df >= 5,
/// interpolated linearly in 1/df between tabulated rows.
double studentized_range_q05(std::size_t k, double df);

struct TukeyPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double diff = 0.0;  // mean_i - mean_j
    double abs_diff = 0.0;
    double threshold = 0.0;
    bool significant = false;  // abs_diff > threshold
};

struct TukeyResult {
    double q_critical = 0.0;
    std::vector<TukeyPair> pairs;  // i < j, lexicographic
    /// 1 + number of groups with a significantly lower mean; 1 is best.
    std::vector<std::size_t> ranks;
};

TukeyResult tukey_kramer(std::span<const GroupSummary> groups, double ms_within, double df_within);

// Results CSV: algorithm,family,size,alpha,beta,seed,makespan_s,cost,energy_kwh,cr,tr,success

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kResultsHeader =
    "algorithm,family,size,alpha,beta,seed,makespan_s,cost,energy_kwh,cr,tr,success";

/// %.6g for every real so files are byte-stable.
std::string format_number(double x);

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const RunResult& r);
void write_results_csv(std::ostream& out, std::span<const RunResult> results);
/// Columns may come in any order; extra columns are ignored. A missing column
/// raises SchemaError naming it.
std::vector<RunResult> read_results_csv(std::istream& in);

}  // namespace wfsched
