// sacc: command line front end for the experiment harness.
//
//   sacc run           run one algorithm on selected suite functions
//   sacc compare       Cohen's d between two algorithms' final values
//   sacc fes-to-match  FEs the baseline needs to reach a target mean
//   sacc plot          SVG convergence plot from convergence CSVs

#include "sacc/benchmark_suite.hpp"
#include "sacc/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sacc;
namespace fs = std::filesystem;

namespace {

constexpr int kExitContract = 2;
constexpr int kExitRuntime = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ContractViolation("cannot read config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> expand_functions(const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids) {
        if (id == "all") {
            for (int k = 1; k <= 18; ++k) out.push_back("F" + std::to_string(k));
        } else {
            out.push_back("F" + std::to_string(parse_function_id(id)));
        }
    }
    return out;
}

void apply_output_override(std::string& output_dir) {
    if (const char* env = std::getenv("SACC_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        output_dir = env;
    }
}

struct RunOptions {
    ExperimentConfig config;
    std::string algorithm = "sacc";
    std::string config_file;
    bool dump_config = false;
};

void add_run_command(CLI::App& app, RunOptions& opts) {
    auto* run = app.add_subcommand("run", "Run an algorithm on benchmark functions and write CSV results");
    auto& c = opts.config;
    run->add_option("-f,--functions", c.functions, "Function ids (F1..F18, or 'all')")->delimiter(',');
    run->add_option("-n,--dimension", c.dimension, "Problem dimension (multiple of 20, >= 40)");
    run->add_option("-a,--algorithm", opts.algorithm, "sacc or shade-cc");
    run->add_option("-b,--budget", c.budget, "Maximum fitness evaluations per run");
    run->add_option("-r,--runs", c.runs, "Independent runs (seeds base..base+runs-1)");
    run->add_option("--base-seed", c.base_seed, "Seed of the first run");
    run->add_option("--suite-seed", c.suite_seed, "Seed for shifts, rotations and permutations");
    run->add_option("--separable-size", c.separable_size,
                    "Sub-problem size for separable variables (0 = 20 if fully separable, else 100)");
    run->add_option("-p,--population", c.population, "Sub-population size p");
    run->add_option("-q,--reevaluations", c.reevaluations, "Real evaluations per generation q (sacc)");
    run->add_option("--archive-factor", c.archive_factor, "Training archive size per variable (d = factor * s)");
    run->add_option("--visit-length", c.visit_length, "Generations per sub-problem visit (shade-cc)");
    run->add_flag("!--no-charge-reevaluation", c.charge_reevaluation,
                  "Do not charge the per-visit population reevaluation (shade-cc)");
    run->add_option("-j,--jobs", c.jobs, "Runs executed in parallel");
    run->add_option("-o,--output-dir", c.output_dir, "Directory for CSV and manifest output (env SACC_OUTPUT_DIR wins)");
    run->add_option("-c,--config", opts.config_file, "JSON config; its keys override command line flags");
    run->add_flag("--dump-config", opts.dump_config, "Print the effective config and exit");
}

int do_run(RunOptions& opts) {
    ExperimentConfig& config = opts.config;
    config.algorithm = parse_algorithm(opts.algorithm);
    if (!opts.config_file.empty()) {
        config.apply_json(read_file(opts.config_file));
    }
    apply_output_override(config.output_dir);
    config.functions = expand_functions(config.functions);
    config.validate();
    if (opts.dump_config) {
        std::cout << config.to_json() << "\n";
        return 0;
    }

    const auto results = run_experiment(config);
    std::printf("%-5s %-9s %10s %14s %14s %14s %14s %14s\n", "fn", "algorithm", "budget", "best", "median", "worst",
                "mean", "std");
    for (const auto& r : results) {
        const auto& s = r.summary;
        std::printf("%-5s %-9s %10zu %14.6e %14.6e %14.6e %14.6e %14.6e\n", s.function_id.c_str(),
                    std::string(to_string(r.algorithm)).c_str(), s.budget, s.best, s.median, s.worst, s.mean, s.std);
    }
    std::printf("results written to %s\n", config.output_dir.c_str());
    return 0;
}

struct CompareOptions {
    std::string results_dir = "results";
    std::vector<std::string> functions{"F1"};
    std::string first = "sacc";
    std::string second = "shade-cc";
};

void add_compare_command(CLI::App& app, CompareOptions& opts) {
    auto* cmp = app.add_subcommand("compare", "Cohen's d between two algorithms' final values");
    cmp->add_option("-d,--results", opts.results_dir, "Directory holding <alg>_<F>_finals.csv files");
    cmp->add_option("-f,--functions", opts.functions, "Function ids")->delimiter(',');
    cmp->add_option("--first", opts.first, "First algorithm (d > 0 means it has the larger mean)");
    cmp->add_option("--second", opts.second, "Second algorithm");
}

int do_compare(CompareOptions& opts) {
    apply_output_override(opts.results_dir);
    const Algorithm a = parse_algorithm(opts.first);
    const Algorithm b = parse_algorithm(opts.second);
    std::printf("%-5s %14s %14s %14s %14s %10s %s\n", "fn", "mean_first", "std_first", "mean_second", "std_second",
                "d", "label");
    for (const auto& id : expand_functions(opts.functions)) {
        const fs::path dir(opts.results_dir);
        const auto fa = read_finals_csv(dir / (result_stem(a, id) + "_finals.csv"));
        const auto fb = read_finals_csv(dir / (result_stem(b, id) + "_finals.csv"));
        const SampleStats sa = sample_stats(fa);
        const SampleStats sb = sample_stats(fb);
        const EffectSize e = cohens_d(sa, sb);
        std::printf("%-5s %14.6e %14.6e %14.6e %14.6e %10.3f %s\n", id.c_str(), sa.mean, sa.std, sb.mean, sb.std, e.d,
                    std::string(to_string(e.label)).c_str());
    }
    return 0;
}

struct MatchOptions {
    std::string results_dir = "results";
    std::vector<std::string> functions{"F1"};
    std::string target_algorithm = "sacc";
    std::string baseline = "shade-cc";
    std::optional<double> target;
};

void add_match_command(CLI::App& app, MatchOptions& opts) {
    auto* m = app.add_subcommand("fes-to-match", "FEs the baseline needs to reach another algorithm's mean final value");
    m->add_option("-d,--results", opts.results_dir, "Directory holding finals and convergence CSVs");
    m->add_option("-f,--functions", opts.functions, "Function ids")->delimiter(',');
    m->add_option("--target-algorithm", opts.target_algorithm, "Algorithm whose mean final value is the target");
    m->add_option("--baseline", opts.baseline, "Algorithm whose convergence curve is searched");
    m->add_option("-t,--target", opts.target, "Explicit target value instead of a mean final value");
}

int do_match(MatchOptions& opts) {
    apply_output_override(opts.results_dir);
    const Algorithm target_alg = parse_algorithm(opts.target_algorithm);
    const Algorithm baseline = parse_algorithm(opts.baseline);
    std::printf("%-5s %14s %14s %s\n", "fn", "target", "baseline_fes", "ratio");
    for (const auto& id : expand_functions(opts.functions)) {
        const fs::path dir(opts.results_dir);
        double target = 0.0;
        std::size_t target_budget = 0;
        if (opts.target) {
            target = *opts.target;
        } else {
            const auto finals = read_finals_csv(dir / (result_stem(target_alg, id) + "_finals.csv"));
            target = sample_stats(finals).mean;
            const auto curve = read_convergence_csv(dir / (result_stem(target_alg, id) + "_convergence.csv"));
            target_budget = curve.back().fe;
        }
        const auto curve = read_convergence_csv(dir / (result_stem(baseline, id) + "_convergence.csv"));
        const auto fes = fes_to_match(target, curve);
        if (!fes) {
            std::printf("%-5s %14.6e %14s (> %zu FEs)\n", id.c_str(), target, "not-reached", curve.back().fe);
        } else if (target_budget > 0) {
            std::printf("%-5s %14.6e %14zu %.2fx\n", id.c_str(), target, *fes,
                        static_cast<double>(*fes) / static_cast<double>(target_budget));
        } else {
            std::printf("%-5s %14.6e %14zu -\n", id.c_str(), target, *fes);
        }
    }
    return 0;
}

struct PlotOptions {
    std::vector<std::string> inputs;
    std::string output = "convergence.svg";
};

void add_plot_command(CLI::App& app, PlotOptions& opts) {
    auto* p = app.add_subcommand("plot", "Render convergence CSVs (fe,mean_fv,std_fv) into one SVG");
    p->add_option("inputs", opts.inputs, "Convergence CSV files")->required()->check(CLI::ExistingFile);
    p->add_option("-o,--output", opts.output, "SVG output path");
}

int do_plot(PlotOptions& opts) {
    std::map<std::string, std::vector<CurvePoint>> curves;
    for (const auto& input : opts.inputs) {
        std::string label = fs::path(input).stem().string();
        const std::string suffix = "_convergence";
        if (label.size() > suffix.size() && label.ends_with(suffix)) {
            label.resize(label.size() - suffix.size());
        }
        curves[label] = read_convergence_csv(input);
    }
    export_convergence_svg(curves, opts.output);
    std::printf("wrote %s\n", opts.output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate-assisted cooperative coevolution experiments"};
    app.set_version_flag("--version", code_version());
    app.require_subcommand(1);

    RunOptions run_opts;
    CompareOptions compare_opts;
    MatchOptions match_opts;
    PlotOptions plot_opts;
    add_run_command(app, run_opts);
    add_compare_command(app, compare_opts);
    add_match_command(app, match_opts);
    add_plot_command(app, plot_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run")) return do_run(run_opts);
        if (app.got_subcommand("compare")) return do_compare(compare_opts);
        if (app.got_subcommand("fes-to-match")) return do_match(match_opts);
        if (app.got_subcommand("plot")) return do_plot(plot_opts);
    } catch (const ContractViolation& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitContract;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
