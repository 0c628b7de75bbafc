#include "wfsched/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>

#include "wfsched/scheduler.hpp"
#include "wfsched/simulator.hpp"

namespace wfsched {

Ratios ratios(double cost, double makespan_s, const QosConstraints& qos) {
    if (!(qos.budget > 0.0) || !(qos.deadline_s > 0.0)) {
        throw std::invalid_argument("budget and deadline must be positive");
    }
    Ratios r;
    r.cr = cost / qos.budget;
    r.tr = makespan_s / qos.deadline_s;
    r.success = r.cr <= 1.0 && r.tr <= 1.0;
    return r;
}

Ratios ratios(const ExecutionTrace& trace, const QosConstraints& qos) {
    return ratios(trace.total_cost, trace.makespan_s, qos);
}

double success_rate(std::span<const bool> successes) {
    if (successes.empty()) throw std::invalid_argument("success rate of an empty result set");
    const auto ok = std::count(successes.begin(), successes.end(), true);
    return 100.0 * static_cast<double>(ok) / static_cast<double>(successes.size());
}

double success_rate(std::span<const RunResult> results) {
    if (results.empty()) throw std::invalid_argument("success rate of an empty result set");
    const auto ok = std::count_if(results.begin(), results.end(), [](const RunResult& r) { return r.success; });
    return 100.0 * static_cast<double>(ok) / static_cast<double>(results.size());
}

GroupSummary summarize(std::string label, std::span<const double> samples) {
    GroupSummary g;
    g.label = std::move(label);
    g.n = samples.size();
    if (g.n == 0) return g;
    g.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(g.n);
    if (g.n > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - g.mean) * (x - g.mean);
        g.variance = ss / static_cast<double>(g.n - 1);
    }
    return g;
}

double f_critical(double alpha, double df1, double df2) {
    boost::math::fisher_f dist(df1, df2);
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

double f_p_value(double f, double df1, double df2) {
    if (!(f > 0.0)) return 1.0;
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

AnovaResult anova(std::span<const GroupSummary> groups, double alpha) {
    if (groups.size() < 2) throw StatsError("ANOVA needs at least two groups");
    std::size_t total_n = 0;
    double weighted = 0.0;
    for (const auto& g : groups) {
        if (g.n < 2) throw StatsError("group '" + g.label + "' has fewer than two samples");
        total_n += g.n;
        weighted += static_cast<double>(g.n) * g.mean;
    }
    const double grand = weighted / static_cast<double>(total_n);

    AnovaResult r;
    for (const auto& g : groups) {
        r.ss_between += static_cast<double>(g.n) * (g.mean - grand) * (g.mean - grand);
        r.ss_within += static_cast<double>(g.n - 1) * g.variance;
    }
    r.ss_total = r.ss_between + r.ss_within;
    r.df_between = groups.size() - 1;
    r.df_within = total_n - groups.size();
    r.ms_between = r.ss_between / static_cast<double>(r.df_between);
    r.ms_within = r.ss_within / static_cast<double>(r.df_within);
    if (r.ms_within > 0.0) {
        r.f_stat = r.ms_between / r.ms_within;
    } else {
        r.f_stat = r.ms_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    const auto d1 = static_cast<double>(r.df_between);
    const auto d2 = static_cast<double>(r.df_within);
    r.f_critical = f_critical(alpha, d1, d2);
    r.p_value = std::isinf(r.f_stat) ? 0.0 : f_p_value(r.f_stat, d1, d2);
    r.significant = r.f_stat >= r.f_critical;
    return r;
}

namespace {

// Upper 5% points of the studentized range, columns k = 2..10.
struct QRow {
    double df;
    std::array<double, 9> q;
};

constexpr double kInfDf = std::numeric_limits<double>::infinity();

constexpr QRow kQ05[] = {
    {5, {3.6354, 4.6017, 5.2183, 5.6731, 6.0329, 6.3299, 6.5823, 6.8014, 6.9947}},
    {6, {3.4605, 4.3392, 4.8956, 5.3049, 5.6284, 5.8953, 6.1222, 6.3192, 6.4931}},
    {7, {3.3441, 4.1649, 4.6813, 5.0601, 5.3591, 5.6057, 5.8153, 5.9973, 6.1579}},
    {8, {3.2612, 4.0410, 4.5288, 4.8858, 5.1672, 5.3991, 5.5962, 5.7673, 5.9183}},
    {9, {3.1992, 3.9485, 4.4149, 4.7554, 5.0235, 5.2444, 5.4319, 5.5947, 5.7384}},
    {10, {3.1511, 3.8768, 4.3266, 4.6543, 4.9120, 5.1242, 5.3042, 5.4605, 5.5984}},
    {11, {3.1127, 3.8196, 4.2561, 4.5736, 4.8230, 5.0281, 5.2021, 5.3531, 5.4863}},
    {12, {3.0813, 3.7729, 4.1987, 4.5077, 4.7502, 4.9496, 5.1187, 5.2653, 5.3946}},
    {13, {3.0552, 3.7341, 4.1509, 4.4529, 4.6897, 4.8842, 5.0491, 5.1921, 5.3181}},
    {14, {3.0332, 3.7014, 4.1105, 4.4066, 4.6385, 4.8290, 4.9903, 5.1301, 5.2534}},
    {15, {3.0143, 3.6734, 4.0760, 4.3670, 4.5947, 4.7816, 4.9399, 5.0770, 5.1979}},
    {16, {2.9980, 3.6491, 4.0461, 4.3327, 4.5568, 4.7406, 4.8962, 5.0310, 5.1498}},
    {17, {2.9837, 3.6280, 4.0200, 4.3027, 4.5237, 4.7048, 4.8580, 4.9907, 5.1077}},
    {18, {2.9712, 3.6093, 3.9970, 4.2763, 4.4944, 4.6731, 4.8243, 4.9552, 5.0705}},
    {19, {2.9600, 3.5927, 3.9766, 4.2528, 4.4685, 4.6450, 4.7944, 4.9236, 5.0375}},
    {20, {2.9500, 3.5779, 3.9583, 4.2319, 4.4452, 4.6199, 4.7676, 4.8954, 5.0079}},
    {21, {2.9410, 3.5646, 3.9419, 4.2130, 4.4244, 4.5973, 4.7435, 4.8699, 4.9813}},
    {22, {2.9329, 3.5526, 3.9270, 4.1959, 4.4055, 4.5769, 4.7217, 4.8469, 4.9572}},
    {23, {2.9255, 3.5417, 3.9136, 4.1805, 4.3883, 4.5583, 4.7018, 4.8260, 4.9353}},
    {24, {2.9188, 3.5317, 3.9013, 4.1663, 4.3727, 4.5413, 4.6838, 4.8069, 4.9152}},
    {25, {2.9126, 3.5226, 3.8900, 4.1534, 4.3583, 4.5258, 4.6672, 4.7894, 4.8969}},
    {26, {2.9070, 3.5142, 3.8796, 4.1415, 4.3451, 4.5115, 4.6519, 4.7733, 4.8800}},
    {27, {2.9017, 3.5064, 3.8701, 4.1305, 4.3329, 4.4983, 4.6378, 4.7584, 4.8644}},
    {28, {2.8969, 3.4993, 3.8612, 4.1203, 4.3217, 4.4861, 4.6248, 4.7446, 4.8500}},
    {29, {2.8924, 3.4926, 3.8530, 4.1109, 4.3112, 4.4747, 4.6127, 4.7318, 4.8366}},
    {30, {2.8882, 3.4864, 3.8454, 4.1021, 4.3015, 4.4642, 4.6014, 4.7199, 4.8241}},
    {40, {2.8582, 3.4421, 3.7907, 4.0391, 4.2316, 4.3885, 4.5205, 4.6345, 4.7345}},
    {45, {2.8484, 3.4275, 3.7727, 4.0184, 4.2087, 4.3635, 4.4939, 4.6063, 4.7050}},
    {60, {2.8288, 3.3987, 3.7371, 3.9774, 4.1632, 4.3141, 4.4411, 4.5504, 4.6463}},
    {120, {2.8000, 3.3561, 3.6846, 3.9169, 4.0960, 4.2412, 4.3630, 4.4678, 4.5595}},
    {kInfDf, {2.7718, 3.3145, 3.6332, 3.8577, 4.0301, 4.1696, 4.2863, 4.3865, 4.4741}},
};

}  // namespace

double studentized_range_q05(std::size_t k, double df) {
    if (k < 2 || k > 10) throw StatsError("studentized range table covers 2..10 groups");
    if (!(df >= 5.0)) throw StatsError("studentized range needs df >= 5");
    const std::size_t col = k - 2;
    constexpr std::size_t rows = std::size(kQ05);
    for (std::size_t i = 0; i + 1 < rows; ++i) {
        const auto& lo = kQ05[i];
        const auto& hi = kQ05[i + 1];
        if (df == lo.df) return lo.q[col];
        if (df < hi.df) {
            // interpolate in 1/df; the infinite row has 1/df = 0
            const double x = 1.0 / df;
            const double x0 = 1.0 / lo.df;
            const double x1 = std::isinf(hi.df) ? 0.0 : 1.0 / hi.df;
            return lo.q[col] + (hi.q[col] - lo.q[col]) * (x - x0) / (x1 - x0);
        }
    }
    return kQ05[rows - 1].q[col];
}

TukeyResult tukey_kramer(std::span<const GroupSummary> groups, double ms_within, double df_within) {
    if (groups.size() < 2) throw StatsError("Tukey-Kramer needs at least two groups");
    TukeyResult r;
    r.q_critical = studentized_range_q05(groups.size(), df_within);
    std::vector<std::size_t> better(groups.size(), 0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            TukeyPair p;
            p.i = i;
            p.j = j;
            p.diff = groups[i].mean - groups[j].mean;
            p.abs_diff = std::fabs(p.diff);
            p.threshold = r.q_critical * std::sqrt(ms_within / 2.0 *
                                                   (1.0 / static_cast<double>(groups[i].n) +
                                                    1.0 / static_cast<double>(groups[j].n)));
            p.significant = p.abs_diff > p.threshold;
            if (p.significant) ++better[p.diff < 0 ? j : i];
            r.pairs.push_back(p);
        }
    }
    r.ranks.resize(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) r.ranks[i] = 1 + better[i];
    return r;
}

// ---------------------------------------------------------------------------

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void write_results_header(std::ostream& out) { out << kResultsHeader << '\n'; }

void write_result_row(std::ostream& out, const RunResult& r) {
    out << r.algorithm << ',' << r.family << ',' << r.size << ',' << format_number(r.alpha) << ','
        << format_number(r.beta) << ',' << r.seed << ',' << format_number(r.makespan_s) << ','
        << format_number(r.cost) << ',' << format_number(r.energy_kwh) << ',' << format_number(r.cr) << ','
        << format_number(r.tr) << ',' << (r.success ? 1 : 0) << '\n';
}

void write_results_csv(std::ostream& out, std::span<const RunResult> results) {
    write_results_header(out);
    for (const auto& r : results) write_result_row(out, r);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::vector<RunResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("results CSV is empty");
    const auto header = split_fields(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

    static const char* kRequired[] = {"algorithm", "family", "size", "alpha", "beta", "seed",
                                      "makespan_s", "cost", "energy_kwh", "cr", "tr", "success"};
    for (const char* name : kRequired) {
        if (!col.count(name)) throw SchemaError(std::string("results CSV is missing column '") + name + "'");
    }

    std::vector<RunResult> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_fields(line);
        if (f.size() < header.size()) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields");
        }
        auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
        auto num = [&](const char* name) {
            try {
                return std::stod(get(name));
            } catch (const std::exception&) {
                throw SchemaError("line " + std::to_string(line_no) + ": column '" + name + "' is not a number");
            }
        };
        RunResult r;
        r.algorithm = get("algorithm");
        r.family = get("family");
        r.size = static_cast<std::size_t>(num("size"));
        r.alpha = num("alpha");
        r.beta = num("beta");
        r.seed = std::stoull(get("seed").empty() ? std::string("0") : get("seed"));
        r.makespan_s = num("makespan_s");
        r.cost = num("cost");
        r.energy_kwh = num("energy_kwh");
        r.cr = num("cr");
        r.tr = num("tr");
        const auto& s = get("success");
        r.success = s == "1" || s == "true" || s == "TRUE" || s == "yes";
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace wfsched
