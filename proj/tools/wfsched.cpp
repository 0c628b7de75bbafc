// wfsched: generate workflows, schedule them, sweep the factor grid, and
// summarize results.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wfsched/experiment.hpp"
#include "wfsched/workflow_io.hpp"

using namespace wfsched;

namespace {

InstanceCatalog load_catalog(const std::string& path) {
    return path.empty() ? InstanceCatalog::ec2_default() : load_catalog_csv(path);
}

SlackMode parse_slack_mode(const std::string& s) {
    if (s == "normalized") return SlackMode::Normalized;
    if (s == "ratio") return SlackMode::Ratio;
    throw CLI::ValidationError("--slack-mode", "expected normalized or ratio");
}

// Writes to `path`, or stdout for "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware workflow scheduling on IaaS clouds"};
    app.require_subcommand(1);

    std::string catalog_path;
    app.add_option("--catalog", catalog_path, "instance catalog CSV (default: built-in EC2 table)")
        ->envname("WFSCHED_CATALOG");

    // ---- schedule
    auto* schedule = app.add_subcommand("schedule", "schedule one workflow and simulate it");
    std::string workflow_path, algo_name = "smwso", trace_path, slack_mode = "normalized";
    double alpha = 4, beta = 4, deadline = 0, budget = 0, reference_mips = 1.0;
    bool no_dup = false, no_merge = false, no_slack = false;
    schedule->add_option("workflow", workflow_path, "workflow file (.json, .dax or .xml)")->required()
        ->check(CLI::ExistingFile);
    schedule->add_option("--algo", algo_name, "smwso, smwsh or heft")
        ->check(CLI::IsMember({"smwso", "smwsh", "heft"}, CLI::ignore_case));
    auto* alpha_opt = schedule->add_option("--alpha", alpha, "deadline factor (deadline = alpha * FS)");
    auto* beta_opt = schedule->add_option("--beta", beta, "budget factor (budget = beta * LB)");
    auto* deadline_opt = schedule->add_option("--deadline", deadline, "absolute deadline in seconds")
        ->check(CLI::PositiveNumber);
    auto* budget_opt = schedule->add_option("--budget", budget, "absolute budget in USD")->check(CLI::PositiveNumber);
    deadline_opt->needs(budget_opt)->excludes(alpha_opt);
    budget_opt->needs(deadline_opt)->excludes(beta_opt);
    schedule->add_option("--trace", trace_path, "write the trace JSON here ('-' for stdout)");
    schedule->add_option("--slack-mode", slack_mode, "normalized or ratio")
        ->check(CLI::IsMember({"normalized", "ratio"}));
    schedule->add_flag("--no-duplication", no_dup);
    schedule->add_flag("--no-merging", no_merge);
    schedule->add_flag("--no-slacking", no_slack);
    schedule->add_option("--reference-mips", reference_mips, "MIPS that DAX runtimes were measured at")
        ->check(CLI::PositiveNumber);

    // ---- sweep
    auto* sweep = app.add_subcommand("sweep", "run the factor grid and write results.csv plus stats");
    sweep->set_config("--config", "", "key=value file with any of the sweep options");
    std::vector<std::string> families{"montage-like", "cybershake-like", "epigenomics-like", "sipht-like",
                                      "ligo-like"};
    std::vector<std::size_t> sizes{50, 100};
    std::vector<double> alphas{4, 8, 12, 16}, betas{4, 8, 12, 16};
    std::size_t reps = 3, jobs = 1;
    std::uint64_t base_seed = 1;
    std::vector<std::string> algos{"smwso", "smwsh", "heft"};
    std::string out_dir = ".";
    bool full_grid = false;
    sweep->add_option("--families", families, "workflow families")->delimiter(',');
    sweep->add_option("--sizes", sizes, "task counts")->delimiter(',');
    sweep->add_option("--alphas", alphas, "deadline factors")->delimiter(',');
    sweep->add_option("--betas", betas, "budget factors")->delimiter(',');
    sweep->add_option("--reps", reps, "repetitions per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", base_seed, "base seed");
    sweep->add_option("--algos", algos, "algorithms")->delimiter(',');
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--full-grid", full_grid, "sizes 50..1000 and 30 repetitions");

    // ---- gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic workflow as JSON");
    std::string family_name, gen_out = "-";
    std::size_t tasks = 0;
    GeneratorSpec spec;
    gen->add_option("--family", family_name, "montage-like, cybershake-like, epigenomics-like, sipht-like, ligo-like")
        ->required();
    gen->add_option("--tasks", tasks, "task count")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", spec.seed, "generator seed");
    gen->add_option("--weight-min", spec.weight_min_mi, "smallest task weight (MI)");
    gen->add_option("--weight-max", spec.weight_max_mi, "largest task weight (MI)");
    gen->add_option("--data-min", spec.data_min_mb, "smallest edge data size (MB)");
    gen->add_option("--data-max", spec.data_max_mb, "largest edge data size (MB)");
    gen->add_option("-o,--output", gen_out, "output file ('-' for stdout)");

    // ---- stats
    auto* stats = app.add_subcommand("stats", "ANOVA, Tukey-Kramer, ranking and success rates of a results CSV");
    std::string csv_path, json_out;
    stats->add_option("results", csv_path, "results CSV")->required()->check(CLI::ExistingFile);
    stats->add_option("--json", json_out, "also write the report as JSON ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto catalog = load_catalog(catalog_path);

        if (*schedule) {
            const auto dag = load_workflow(workflow_path, DaxOptions{reference_mips});
            require_valid(dag);
            const auto algo = parse_algorithm(algo_name);
            const QosConstraints qos =
                *deadline_opt ? QosConstraints{deadline, budget} : qos_from_factors(dag, catalog, alpha, beta);
            SchedulerOptions options;
            options.slack_mode = parse_slack_mode(slack_mode);
            options.duplication = !no_dup;
            options.pipeline_merging = !no_merge;
            options.slacking = !no_slack;
            const auto run = run_once(algo, dag, catalog, qos, options);
            const auto r = ratios(run.trace, qos);
            if (!trace_path.empty()) {
                with_output(trace_path, [&](std::ostream& out) { out << trace_to_json(run.trace, dag).dump(2) << '\n'; });
            }
            std::ostream& summary = trace_path == "-" ? std::cerr : std::cout;
            summary << "algorithm=" << to_string(algo) << " tasks=" << dag.size() << " vms=" << run.schedule.vms.size()
                    << " deadline_s=" << format_number(qos.deadline_s) << " budget=" << format_number(qos.budget)
                    << " makespan_s=" << format_number(run.trace.makespan_s)
                    << " cost=" << format_number(run.trace.total_cost)
                    << " energy_kwh=" << format_number(run.trace.total_energy_kwh) << " cr=" << format_number(r.cr)
                    << " tr=" << format_number(r.tr) << " success=" << (r.success ? 1 : 0) << '\n';
            return 0;
        }

        if (*sweep) {
            SweepConfig config;
            config.families.clear();
            for (const auto& f : families) config.families.push_back(parse_family(f));
            config.sizes = sizes;
            config.alphas = alphas;
            config.betas = betas;
            config.repetitions = reps;
            config.base_seed = base_seed;
            config.algorithms.clear();
            for (const auto& a : algos) config.algorithms.push_back(parse_algorithm(a));
            config.catalog_path = catalog_path;
            config.output_dir = out_dir;
            config.jobs = jobs;
            if (full_grid) config.use_full_grid();

            const auto outcome = run_sweep(config, catalog);
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            with_output((dir / "results.csv").string(),
                        [&](std::ostream& out) { write_results_csv(out, outcome.results); });
            if (!outcome.failures.empty()) {
                with_output((dir / "failures.csv").string(), [&](std::ostream& out) {
                    out << "algorithm,family,size,alpha,beta,seed,message\n";
                    for (const auto& f : outcome.failures) {
                        out << f.algorithm << ',' << f.family << ',' << f.size << ',' << format_number(f.alpha) << ','
                            << format_number(f.beta) << ',' << f.seed << ",\"" << f.message << "\"\n";
                    }
                });
            }
            const auto report = build_stats_report(outcome.results);
            with_output((dir / "stats.json").string(),
                        [&](std::ostream& out) { out << report_to_json(report).dump(2) << '\n'; });
            with_output((dir / "stats.txt").string(), [&](std::ostream& out) { write_report_text(out, report); });
            std::cout << "rows=" << outcome.results.size() << " failures=" << outcome.failures.size()
                      << " out=" << out_dir << '\n';
            return 0;
        }

        if (*gen) {
            spec.family = parse_family(family_name);
            spec.task_count = tasks;
            const auto dag = generate(spec);
            with_output(gen_out, [&](std::ostream& out) { write_workflow_json(out, dag); });
            return 0;
        }

        if (*stats) {
            std::ifstream in(csv_path, std::ios::binary);
            const auto rows = read_results_csv(in);
            const auto report = build_stats_report(rows);
            if (!json_out.empty()) {
                with_output(json_out, [&](std::ostream& out) { out << report_to_json(report).dump(2) << '\n'; });
            }
            if (json_out != "-") write_report_text(std::cout, report);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
