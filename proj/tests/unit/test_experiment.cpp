#include "sacc/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace sacc;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sacc_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

RunRecord trace_of(std::vector<std::pair<std::size_t, double>> points) {
    RunRecord r;
    for (const auto& [fe, f] : points) r.trace.push_back({0, 0, fe, f});
    r.best_f = r.trace.back().f;
    r.fes_used = r.trace.back().fes;
    return r;
}

ExperimentConfig tiny_config(const std::string& name) {
    ExperimentConfig config;
    config.functions = {"F1"};
    config.dimension = 40;
    config.budget = 900;
    config.runs = 2;
    config.population = 10;
    config.reevaluations = 2;
    config.separable_size = 10;
    config.output_dir = scratch_dir(name).string();
    return config;
}

}  // namespace

TEST(CohensD, HandComputedLarge) {
    const auto e = cohens_d({10, 1.0, 1.0}, {10, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(e.d, 1.0);
    EXPECT_EQ(e.label, EffectLabel::large);
}

TEST(CohensD, Bands) {
    EXPECT_EQ(cohens_d({5, 0.25, 1.0}, {5, 0.0, 1.0}).label, EffectLabel::small);
    EXPECT_EQ(cohens_d({5, 0.5, 1.0}, {5, 0.0, 1.0}).label, EffectLabel::medium);
    EXPECT_EQ(cohens_d({5, 0.1, 1.0}, {5, 0.0, 1.0}).label, EffectLabel::similar);
    EXPECT_EQ(cohens_d({5, 0.0, 1.0}, {5, 0.8, 1.0}).label, EffectLabel::large);
    const auto same = cohens_d({5, 3.0, 2.0}, {5, 3.0, 2.0});
    EXPECT_EQ(same.d, 0.0);
    EXPECT_EQ(same.label, EffectLabel::similar);
}

TEST(CohensD, Antisymmetric) {
    const SampleStats a{7, 1.3, 0.4}, b{7, -0.2, 2.1};
    EXPECT_EQ(cohens_d(a, b).d, -cohens_d(b, a).d);
}

TEST(CohensD, ZeroPooledStd) {
    EXPECT_EQ(cohens_d({3, 2.0, 0.0}, {3, 1.0, 0.0}).d, std::numeric_limits<double>::infinity());
    EXPECT_EQ(cohens_d({3, 1.0, 0.0}, {3, 2.0, 0.0}).d, -std::numeric_limits<double>::infinity());
    EXPECT_EQ(cohens_d({3, 1.0, 0.0}, {3, 2.0, 0.0}).label, EffectLabel::large);
    EXPECT_EQ(cohens_d({3, 1.0, 0.0}, {3, 1.0, 0.0}).d, 0.0);
}

TEST(CohensD, RejectsBadSamples) {
    EXPECT_THROW(cohens_d({1, 0.0, 0.0}, {1, 0.0, 0.0}), ContractViolation);
    EXPECT_THROW(cohens_d({3, 0.0, 1.0}, {4, 0.0, 1.0}), ContractViolation);
    EXPECT_THROW(cohens_d({3, 0.0, std::nan("")}, {3, 0.0, 1.0}), ContractViolation);
}

TEST(FesToMatch, FirstCrossing) {
    const std::vector<CurvePoint> curve{{100, 10.0, 0.0}, {200, 5.0, 0.0}};
    EXPECT_EQ(fes_to_match(6.0, curve), std::optional<std::size_t>(200));
    EXPECT_EQ(fes_to_match(50.0, curve), std::optional<std::size_t>(100));
    EXPECT_FALSE(fes_to_match(1.0, curve).has_value());
    EXPECT_THROW(fes_to_match(1.0, std::vector<CurvePoint>{}), ContractViolation);
}

TEST(Summary, SingleRun) {
    const std::vector<double> finals{4.5};
    const auto row = summarize("F1", 100, finals);
    EXPECT_EQ(row.best, 4.5);
    EXPECT_EQ(row.median, 4.5);
    EXPECT_EQ(row.worst, 4.5);
    EXPECT_EQ(row.mean, 4.5);
    EXPECT_EQ(row.std, 0.0);
}

TEST(Summary, MatchesIndependentRecomputation) {
    const std::vector<double> finals{3.0, 1.0, 4.0, 1.5, 9.0, 2.5};
    const auto row = summarize("F2", 10, finals);
    EXPECT_EQ(row.best, 1.0);
    EXPECT_EQ(row.worst, 9.0);
    EXPECT_NEAR(row.median, (2.5 + 3.0) / 2.0, 1e-12);
    const double mean = 21.0 / 6.0;
    double sq = 0.0;
    for (double v : finals) sq += (v - mean) * (v - mean);
    EXPECT_NEAR(row.mean, mean, 1e-12);
    EXPECT_NEAR(row.std, std::sqrt(sq / 5.0), 1e-12);
}

TEST(MeanCurve, OneRunEqualsTrace) {
    const std::vector<RunRecord> runs{trace_of({{10, 5.0}, {20, 3.0}, {30, 1.0}})};
    const auto curve = mean_curve(runs);
    ASSERT_EQ(curve.size(), 3u);
    EXPECT_EQ(curve[1].fe, 20u);
    EXPECT_EQ(curve[1].mean, 3.0);
    EXPECT_EQ(curve[1].std, 0.0);
}

TEST(MeanCurve, HandComputedAverageOfTwoTraces) {
    const std::vector<RunRecord> runs{trace_of({{10, 8.0}, {20, 4.0}, {40, 2.0}}),
                                      trace_of({{10, 6.0}, {30, 2.0}, {40, 0.0}})};
    const auto curve = mean_curve(runs);
    ASSERT_EQ(curve.size(), 4u);
    const std::size_t fes[] = {10, 20, 30, 40};
    const double means[] = {7.0, 5.0, 3.0, 1.0};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(curve[i].fe, fes[i]);
        EXPECT_DOUBLE_EQ(curve[i].mean, means[i]);
    }
    EXPECT_DOUBLE_EQ(curve[0].std, std::sqrt(2.0));
}

TEST(Config, JsonRoundTripAndOverride) {
    ExperimentConfig a;
    a.functions = {"F3", "F9"};
    a.algorithm = Algorithm::shade_cc;
    a.budget = 1234;
    a.archive_factor = 4.5;
    ExperimentConfig b;
    b.apply_json(a.to_json());
    EXPECT_EQ(b.to_json(), a.to_json());

    b.apply_json(R"({"runs": 3, "function": "F2"})");
    EXPECT_EQ(b.runs, 3u);
    EXPECT_EQ(b.functions, std::vector<std::string>{"F2"});
    EXPECT_EQ(b.budget, 1234u);
    EXPECT_THROW(b.apply_json("{not json"), ContractViolation);
    EXPECT_THROW(b.apply_json(R"({"runs": "many"})"), ContractViolation);
    EXPECT_THROW(b.apply_json(R"({"algorithm": "ga"})"), ContractViolation);
}

TEST(Config, ValidateRejectsBadValues) {
    ExperimentConfig c;
    c.reevaluations = 200;
    EXPECT_THROW(c.validate(), ContractViolation);
    c = {};
    c.functions = {"F19"};
    EXPECT_THROW(c.validate(), ContractViolation);
    c = {};
    c.runs = 0;
    EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Config, DefaultSeparableSizeFollowsStructure) {
    ExperimentConfig c;
    EXPECT_EQ(separable_size_for(c, make_function(1, 40, 1)), 20u);
    EXPECT_EQ(separable_size_for(c, make_function(4, 40, 1)), 100u);
    c.separable_size = 7;
    EXPECT_EQ(separable_size_for(c, make_function(4, 40, 1)), 7u);
}

TEST(Experiment, BudgetBelowInitializationRejected) {
    auto config = tiny_config("budget");
    config.budget = 50;
    EXPECT_THROW(run_single(config, make_function(1, 40, 1)), ContractViolation);
}

TEST(Experiment, OutputsAreByteIdenticalAcrossInvocations) {
    auto first = tiny_config("first");
    auto second = tiny_config("second");
    second.jobs = 2;
    run_experiment(first);
    run_experiment(second);
    for (const std::string name : {"sacc_F1_trace_seed1.csv", "sacc_F1_trace_seed2.csv", "sacc_F1_finals.csv",
                                   "sacc_F1_convergence.csv", "sacc_summary.csv"}) {
        const auto a = slurp(std::filesystem::path(first.output_dir) / name);
        ASSERT_FALSE(a.empty()) << name;
        EXPECT_EQ(a, slurp(std::filesystem::path(second.output_dir) / name)) << name;
    }
}

TEST(Experiment, CsvSchemasArePinned) {
    auto config = tiny_config("schema");
    config.runs = 1;
    const auto results = run_experiment(config);
    const std::filesystem::path dir(config.output_dir);
    auto header = [](const std::string& text) { return text.substr(0, text.find('\n')); };
    EXPECT_EQ(header(slurp(dir / "sacc_F1_trace_seed1.csv")), "generation,subproblem,fes,fv");
    EXPECT_EQ(header(slurp(dir / "sacc_F1_finals.csv")), "seed,final_fv,fes_used");
    EXPECT_EQ(header(slurp(dir / "sacc_F1_convergence.csv")), "fe,mean_fv,std_fv");
    EXPECT_EQ(header(slurp(dir / "sacc_summary.csv")), "algorithm,function,budget,best,median,worst,mean,std");

    // A single run's convergence curve is its own trace.
    const auto curve = read_convergence_csv(dir / "sacc_F1_convergence.csv");
    const auto& trace = results[0].runs[0].trace;
    ASSERT_EQ(curve.size(), trace.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        EXPECT_EQ(curve[i].fe, trace[i].fes);
        EXPECT_EQ(curve[i].mean, trace[i].f);
    }
    EXPECT_EQ(read_finals_csv(dir / "sacc_F1_finals.csv"), std::vector<double>{results[0].runs[0].best_f});

    const auto manifest = slurp(dir / "sacc_manifest.json");
    EXPECT_NE(manifest.find("\"code_version\""), std::string::npos);
    EXPECT_NE(manifest.find("\"seeds\""), std::string::npos);
}

TEST(Experiment, ShadeCcRunsThroughHarness) {
    auto config = tiny_config("cc");
    config.algorithm = Algorithm::shade_cc;
    config.visit_length = 3;
    const auto results = run_experiment(config);
    ASSERT_EQ(results.size(), 1u);
    EXPECT_EQ(results[0].runs.size(), 2u);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(config.output_dir) / "shade-cc_summary.csv"));
}

TEST(Format, RoundTripsDoubles) {
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(v)), v);
}
