#pragma once

#include "sacc/benchmark_suite.hpp"
#include "sacc/decomposition.hpp"
#include "sacc/sacc.hpp"
#include "sacc/shade_cc.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sacc {

enum class Algorithm { sacc, shade_cc };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
    std::vector<std::string> functions{"F1"};
    std::size_t dimension = 1000;
    Algorithm algorithm = Algorithm::sacc;
    std::size_t budget = 300000;
    std::size_t runs = 25;
    std::uint64_t base_seed = 1;
    std::uint64_t suite_seed = 1;
    /// Separable chunk size; 0 selects 20 for fully separable functions and
    /// 100 otherwise.
    std::size_t separable_size = 0;
    std::size_t population = 100;
    std::size_t reevaluations = 10;
    double archive_factor = 5.0;
    std::size_t visit_length = 100;
    bool charge_reevaluation = true;
    std::size_t jobs = 1;
    std::string output_dir = "results";

    /// Throws ContractViolation on an unusable configuration.
    void validate() const;

    std::string to_json() const;
    /// Overrides the fields present in a JSON object.
    void apply_json(std::string_view text);
};

std::size_t separable_size_for(const ExperimentConfig& config, const BenchmarkFunction& fn);

/// Smallest budget a run of `config` on `fn` can be given.
std::size_t minimum_budget(const ExperimentConfig& config, const BenchmarkFunction& fn);

struct SummaryRow {
    std::string function_id;
    std::size_t budget = 0;
    double best = 0.0;
    double median = 0.0;
    double worst = 0.0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single run
};

SummaryRow summarize(std::string function_id, std::size_t budget, std::span<const double> finals);

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
};

SampleStats sample_stats(std::span<const double> values);

enum class EffectLabel { similar, small, medium, large };

std::string_view to_string(EffectLabel label);

struct EffectSize {
    double d = 0.0;
    EffectLabel label = EffectLabel::similar;
};

/// d = (mean_a - mean_b) / sqrt((std_a^2 + std_b^2) / 2), labeled by |d|:
/// [0.2, 0.3) small, [0.3, 0.8) medium, >= 0.8 large, below 0.2 similar.
EffectSize cohens_d(const SampleStats& a, const SampleStats& b);

struct CurvePoint {
    std::size_t fe = 0;
    double mean = 0.0;
    double std = 0.0;
};

/// Cross-run mean/std of f(x*) on the union of the runs' FE grids; each run
/// holds its last recorded value between rows. Starts where every run has a
/// value.
std::vector<CurvePoint> mean_curve(std::span<const RunRecord> runs);

/// First FE count at which the curve's mean is <= target; nullopt when the
/// target is never reached.
std::optional<std::size_t> fes_to_match(double target, std::span<const CurvePoint> curve);

struct ExperimentResult {
    std::string function_id;
    Algorithm algorithm = Algorithm::sacc;
    std::vector<std::uint64_t> seeds;
    std::vector<RunRecord> runs;
    SummaryRow summary;
    std::string decomposition_json;
};

/// Runs `config.runs` trials with seeds base_seed .. base_seed + runs - 1.
ExperimentResult run_single(const ExperimentConfig& config, const BenchmarkFunction& fn);

/// All configured functions; writes traces, finals, summary, convergence
/// curves and the manifest under config.output_dir.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config);

/// One run with the configured algorithm.
RunRecord run_trial(const ExperimentConfig& config, const BenchmarkFunction& fn, std::uint64_t seed);

// CSV persistence. Columns:
//   trace:        generation,subproblem,fes,fv
//   finals:       seed,final_fv,fes_used
//   summary:      algorithm,function,budget,best,median,worst,mean,std
//   convergence:  fe,mean_fv,std_fv
std::string format_double(double v);
std::string trace_csv(const RunRecord& record);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_results(const ExperimentConfig& config, std::span<const ExperimentResult> results);
std::string result_stem(Algorithm algorithm, std::string_view function_id);

void export_convergence(std::span<const CurvePoint> curve, const std::filesystem::path& path);
/// Log-scale line plot of one or more curves as a standalone SVG.
void export_convergence_svg(const std::map<std::string, std::vector<CurvePoint>>& curves,
                            const std::filesystem::path& path);

std::vector<CurvePoint> read_convergence_csv(const std::filesystem::path& path);
/// Reads the `final_fv` column of a finals CSV (or any CSV with that column).
std::vector<double> read_finals_csv(const std::filesystem::path& path);

std::string code_version();

}  // namespace sacc
