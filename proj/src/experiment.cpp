#include "wfsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace wfsched {

QosConstraints qos_from_factors(const WorkflowDag& dag, const InstanceCatalog& catalog, double alpha,
                                double beta) {
    const auto base = fs_lb(dag, catalog);
    return {alpha * base.fastest_schedule_s, beta * base.lowest_budget};
}

RunOutput run_once(Algorithm algo, const WorkflowDag& dag, const InstanceCatalog& catalog,
                   const QosConstraints& qos, const SchedulerOptions& options) {
    RunOutput out{run_algorithm(algo, dag, catalog, qos, options), {}};
    out.trace = simulate(out.schedule, dag, catalog);
    return out;
}

void SweepConfig::use_full_grid() {
    sizes = {50, 100, 200, 500, 1000};
    repetitions = 30;
}

void validate(const SweepConfig& c) {
    if (c.families.empty()) throw std::invalid_argument("sweep needs at least one family");
    if (c.sizes.empty()) throw std::invalid_argument("sweep needs at least one size");
    if (c.alphas.empty() || c.betas.empty()) throw std::invalid_argument("factor lists must not be empty");
    if (c.algorithms.empty()) throw std::invalid_argument("sweep needs at least one algorithm");
    if (c.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    for (double f : c.alphas) {
        if (!(f > 0.0)) throw std::invalid_argument("alpha factors must be positive");
    }
    for (double f : c.betas) {
        if (!(f > 0.0)) throw std::invalid_argument("beta factors must be positive");
    }
    for (Family fam : c.families) {
        for (std::size_t n : c.sizes) {
            if (n < min_task_count(fam)) {
                throw std::invalid_argument(std::string(to_string(fam)) + " needs at least " +
                                            std::to_string(min_task_count(fam)) + " tasks");
            }
        }
    }
}

std::uint64_t derive_seed(std::uint64_t base_seed, Family family, std::size_t size, std::size_t repetition) {
    // FNV-1a over the cell key, then a splitmix64 round to spread the bits.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    feed(base_seed);
    for (char ch : to_string(family)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    feed(size);
    feed(repetition);
    h += 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

namespace {

struct Unit {
    Family family;
    std::size_t size;
    std::size_t rep;
};

struct UnitOutput {
    std::vector<RunResult> results;
    std::vector<SweepFailure> failures;
};

UnitOutput run_unit(const SweepConfig& config, const InstanceCatalog& catalog, const Unit& u) {
    UnitOutput out;
    const auto seed = derive_seed(config.base_seed, u.family, u.size, u.rep);
    const std::string family(to_string(u.family));

    std::optional<WorkflowDag> dag;
    std::string gen_error;
    try {
        GeneratorSpec spec = config.generator;
        spec.family = u.family;
        spec.task_count = u.size;
        spec.seed = seed;
        dag = generate(spec);
    } catch (const std::exception& e) {
        gen_error = std::string("generation failed: ") + e.what();
    }

    for (double alpha : config.alphas) {
        for (double beta : config.betas) {
            for (Algorithm algo : config.algorithms) {
                const std::string name(to_string(algo));
                if (!dag) {
                    out.failures.push_back({name, family, u.size, alpha, beta, seed, gen_error});
                    continue;
                }
                try {
                    const auto qos = qos_from_factors(*dag, catalog, alpha, beta);
                    const auto run = run_once(algo, *dag, catalog, qos, config.scheduler);
                    const auto r = ratios(run.trace, qos);
                    out.results.push_back({name, family, u.size, alpha, beta, seed, run.trace.makespan_s,
                                           run.trace.total_cost, run.trace.total_energy_kwh, r.cr, r.tr,
                                           r.success});
                } catch (const std::exception& e) {
                    out.failures.push_back({name, family, u.size, alpha, beta, seed, e.what()});
                }
            }
        }
    }
    return out;
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& config, const InstanceCatalog& catalog) {
    validate(config);
    std::vector<Unit> units;
    for (Family f : config.families) {
        for (std::size_t n : config.sizes) {
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) units.push_back({f, n, rep});
        }
    }

    std::vector<UnitOutput> outputs(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            outputs[i] = run_unit(config, catalog, units[i]);
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(units.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Concatenating in unit order keeps the output independent of completion order.
    SweepOutcome out;
    for (auto& o : outputs) {
        out.results.insert(out.results.end(), o.results.begin(), o.results.end());
        out.failures.insert(out.failures.end(), o.failures.begin(), o.failures.end());
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<AnovaResult> try_anova(const std::vector<GroupSummary>& groups, std::string& notice) {
    if (groups.size() < 2) {
        notice = "only one algorithm; ANOVA skipped";
        return std::nullopt;
    }
    for (const auto& g : groups) {
        if (g.n < 2) {
            notice = "group '" + g.label + "' has fewer than two runs; ANOVA skipped";
            return std::nullopt;
        }
    }
    return anova(groups);
}

}  // namespace

StatsReport build_stats_report(const std::vector<RunResult>& results) {
    StatsReport report;
    struct Acc {
        std::map<std::string, std::vector<double>> energy;
        std::map<std::string, std::vector<bool>> success;
    };
    std::map<std::pair<std::string, std::size_t>, Acc> cells;
    std::map<std::string, std::vector<bool>> overall;
    for (const auto& r : results) {
        auto& acc = cells[{r.family, r.size}];
        acc.energy[r.algorithm].push_back(r.energy_kwh);
        acc.success[r.algorithm].push_back(r.success);
        overall[r.algorithm].push_back(r.success);
    }

    std::map<std::string, std::vector<double>> sr_per_cell;
    for (const auto& [key, acc] : cells) {
        CellReport cell;
        cell.family = key.first;
        cell.size = key.second;
        for (const auto& [algo, xs] : acc.energy) cell.energy.push_back(summarize(algo, xs));
        for (const auto& [algo, ok] : acc.success) {
            const double sr = 100.0 * static_cast<double>(std::count(ok.begin(), ok.end(), true)) /
                              static_cast<double>(ok.size());
            cell.success_rate.emplace_back(algo, sr);
            sr_per_cell[algo].push_back(sr);
        }
        cell.anova = try_anova(cell.energy, cell.notice);
        if (cell.anova) {
            try {
                cell.tukey = tukey_kramer(cell.energy, cell.anova->ms_within,
                                          static_cast<double>(cell.anova->df_within));
            } catch (const StatsError& e) {
                cell.notice = std::string("Tukey-Kramer skipped: ") + e.what();
            }
        }
        report.cells.push_back(std::move(cell));
    }
    for (const auto& [algo, ok] : overall) {
        const auto n = static_cast<double>(ok.size());
        report.overall_success_rate.emplace_back(algo, 100.0 * static_cast<double>(std::count(ok.begin(), ok.end(), true)) / n);
    }
    for (const auto& [algo, xs] : sr_per_cell) report.success_groups.push_back(summarize(algo, xs));
    report.success_anova = try_anova(report.success_groups, report.success_notice);
    return report;
}

nlohmann::json report_to_json(const StatsReport& report) {
    auto summary = [](const GroupSummary& g) {
        return nlohmann::json{{"label", g.label}, {"n", g.n}, {"mean", g.mean}, {"variance", g.variance}};
    };
    auto anova_json = [](const AnovaResult& a) {
        return nlohmann::json{{"ss_between", a.ss_between}, {"ss_within", a.ss_within},
                              {"ss_total", a.ss_total},     {"df_between", a.df_between},
                              {"df_within", a.df_within},   {"ms_between", a.ms_between},
                              {"ms_within", a.ms_within},   {"f_stat", a.f_stat},
                              {"f_critical", a.f_critical}, {"p_value", a.p_value},
                              {"significant", a.significant}};
    };

    nlohmann::json doc;
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json cell{{"family", c.family}, {"size", c.size}};
        auto groups = nlohmann::json::array();
        for (const auto& g : c.energy) groups.push_back(summary(g));
        cell["energy"] = std::move(groups);
        auto sr = nlohmann::json::object();
        for (const auto& [algo, v] : c.success_rate) sr[algo] = v;
        cell["success_rate"] = std::move(sr);
        if (c.anova) cell["anova"] = anova_json(*c.anova);
        if (c.tukey) {
            nlohmann::json t{{"q_critical", c.tukey->q_critical}};
            auto pairs = nlohmann::json::array();
            for (const auto& p : c.tukey->pairs) {
                pairs.push_back({{"a", c.energy[p.i].label},
                                 {"b", c.energy[p.j].label},
                                 {"diff", p.diff},
                                 {"abs_diff", p.abs_diff},
                                 {"threshold", p.threshold},
                                 {"significant", p.significant}});
            }
            t["pairs"] = std::move(pairs);
            auto ranks = nlohmann::json::object();
            for (std::size_t i = 0; i < c.energy.size(); ++i) ranks[c.energy[i].label] = c.tukey->ranks[i];
            t["ranking"] = std::move(ranks);
            cell["tukey"] = std::move(t);
        }
        if (!c.notice.empty()) cell["notice"] = c.notice;
        cells.push_back(std::move(cell));
    }
    doc["cells"] = std::move(cells);

    auto overall = nlohmann::json::object();
    for (const auto& [algo, v] : report.overall_success_rate) overall[algo] = v;
    doc["success_rate"] = std::move(overall);
    auto groups = nlohmann::json::array();
    for (const auto& g : report.success_groups) groups.push_back(summary(g));
    doc["success_rate_groups"] = std::move(groups);
    if (report.success_anova) doc["success_rate_anova"] = anova_json(*report.success_anova);
    if (!report.success_notice.empty()) doc["success_rate_notice"] = report.success_notice;
    return doc;
}

namespace {

void print_anova(std::ostream& out, const AnovaResult& a) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-8s %12s %5s %12s %9s %10s %8s\n", "source", "SS", "df", "MS", "F",
                  "p", "F crit");
    out << line;
    std::snprintf(line, sizeof line, "  %-8s %12.4f %5zu %12.4f %9.3f %10.3g %8.3f%s\n", "between", a.ss_between,
                  a.df_between, a.ms_between, a.f_stat, a.p_value, a.f_critical,
                  a.significant ? "  significant" : "  not significant");
    out << line;
    std::snprintf(line, sizeof line, "  %-8s %12.4f %5zu %12.4f\n", "within", a.ss_within, a.df_within,
                  a.ms_within);
    out << line;
}

}  // namespace

void write_report_text(std::ostream& out, const StatsReport& report) {
    char line[256];
    std::set<std::string> algorithms;
    for (const auto& c : report.cells) {
        for (const auto& g : c.energy) algorithms.insert(g.label);
    }

    for (const auto& c : report.cells) {
        out << "== " << c.family << ' ' << c.size << " (energy, kWh)\n";
        for (const auto& g : c.energy) {
            std::snprintf(line, sizeof line, "  %-10s n=%-4zu mean=%-12.6g var=%.6g\n", g.label.c_str(), g.n,
                          g.mean, g.variance);
            out << line;
        }
        if (c.anova) print_anova(out, *c.anova);
        if (c.tukey) {
            std::snprintf(line, sizeof line, "  Tukey-Kramer, q = %.4f\n", c.tukey->q_critical);
            out << line;
            for (const auto& p : c.tukey->pairs) {
                const std::string pair = c.energy[p.i].label + " vs " + c.energy[p.j].label;
                std::snprintf(line, sizeof line, "    %-22s diff=%-10.4g |diff|=%-10.4g hsd=%-10.4g %s\n",
                              pair.c_str(), p.diff, p.abs_diff, p.threshold, p.significant ? "YES" : "no");
                out << line;
            }
        }
        if (!c.notice.empty()) out << "  note: " << c.notice << '\n';
    }

    out << "\nEnergy ranking (1 = most efficient)\n";
    std::snprintf(line, sizeof line, "%-24s", "workflow");
    out << line;
    for (const auto& a : algorithms) {
        std::snprintf(line, sizeof line, " %8s", a.c_str());
        out << line;
    }
    out << '\n';
    for (const auto& c : report.cells) {
        const std::string name = c.family + " " + std::to_string(c.size);
        std::snprintf(line, sizeof line, "%-24s", name.c_str());
        out << line;
        for (const auto& a : algorithms) {
            std::string cellv = "-";
            for (std::size_t i = 0; i < c.energy.size(); ++i) {
                if (c.energy[i].label == a && c.tukey) cellv = std::to_string(c.tukey->ranks[i]);
            }
            std::snprintf(line, sizeof line, " %8s", cellv.c_str());
            out << line;
        }
        out << '\n';
    }

    out << "\nSuccess rate (%)\n";
    std::snprintf(line, sizeof line, "%-24s", "workflow");
    out << line;
    for (const auto& a : algorithms) {
        std::snprintf(line, sizeof line, " %8s", a.c_str());
        out << line;
    }
    out << '\n';
    for (const auto& c : report.cells) {
        const std::string name = c.family + " " + std::to_string(c.size);
        std::snprintf(line, sizeof line, "%-24s", name.c_str());
        out << line;
        for (const auto& a : algorithms) {
            std::string cellv = "-";
            for (const auto& [algo, v] : c.success_rate) {
                if (algo == a) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.1f", v);
                    cellv = buf;
                }
            }
            std::snprintf(line, sizeof line, " %8s", cellv.c_str());
            out << line;
        }
        out << '\n';
    }
    std::snprintf(line, sizeof line, "%-24s", "overall");
    out << line;
    for (const auto& a : algorithms) {
        std::string cellv = "-";
        for (const auto& [algo, v] : report.overall_success_rate) {
            if (algo == a) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", v);
                cellv = buf;
            }
        }
        std::snprintf(line, sizeof line, " %8s", cellv.c_str());
        out << line;
    }
    out << '\n';
    if (report.success_anova) {
        out << "\nSuccess-rate ANOVA across cells\n";
        print_anova(out, *report.success_anova);
    } else if (!report.success_notice.empty()) {
        out << "\nSuccess-rate ANOVA: " << report.success_notice << '\n';
    }
}

}  // namespace wfsched
