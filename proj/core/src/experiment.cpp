#include "sacc/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef SACC_VERSION_STRING
#define SACC_VERSION_STRING "unknown"
#endif

namespace sacc {

std::string code_version() { return SACC_VERSION_STRING; }

std::string_view to_string(Algorithm algorithm) {
    return algorithm == Algorithm::sacc ? "sacc" : "shade-cc";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "sacc" || name == "rbf-shade-sacc") {
        return Algorithm::sacc;
    }
    if (name == "shade-cc" || name == "shade_cc" || name == "cc") {
        return Algorithm::shade_cc;
    }
    throw ContractViolation("unknown algorithm '" + std::string(name) + "' (expected sacc or shade-cc)");
}

void ExperimentConfig::validate() const {
    if (functions.empty()) {
        throw ContractViolation("config: no benchmark function selected");
    }
    for (const auto& id : functions) {
        parse_function_id(id);
    }
    if (runs < 1) {
        throw ContractViolation("config: runs must be >= 1");
    }
    if (population < SubPopulation::min_size) {
        throw ContractViolation("config: population must be >= 4");
    }
    if (reevaluations < 1 || reevaluations > population) {
        throw ContractViolation("config: q must be in [1, p]");
    }
    if (!(archive_factor > 0.0)) {
        throw ContractViolation("config: archive factor must be positive");
    }
    if (visit_length < 1) {
        throw ContractViolation("config: visit length must be >= 1");
    }
    if (jobs < 1) {
        throw ContractViolation("config: jobs must be >= 1");
    }
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j = {{"functions", functions},
                        {"dimension", dimension},
                        {"algorithm", to_string(algorithm)},
                        {"budget", budget},
                        {"runs", runs},
                        {"base_seed", base_seed},
                        {"suite_seed", suite_seed},
                        {"separable_size", separable_size},
                        {"population", population},
                        {"reevaluations", reevaluations},
                        {"archive_factor", archive_factor},
                        {"visit_length", visit_length},
                        {"charge_reevaluation", charge_reevaluation},
                        {"jobs", jobs},
                        {"output_dir", output_dir}};
    return j.dump(2);
}

void ExperimentConfig::apply_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractViolation(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ContractViolation("config: expected a JSON object");
    }
    try {
        if (j.contains("functions")) {
            functions = j["functions"].is_array() ? j["functions"].get<std::vector<std::string>>()
                                                  : std::vector<std::string>{j["functions"].get<std::string>()};
        }
        if (j.contains("function")) functions = {j["function"].get<std::string>()};
        if (j.contains("dimension")) dimension = j["dimension"].get<std::size_t>();
        if (j.contains("algorithm")) algorithm = parse_algorithm(j["algorithm"].get<std::string>());
        if (j.contains("budget")) budget = j["budget"].get<std::size_t>();
        if (j.contains("runs")) runs = j["runs"].get<std::size_t>();
        if (j.contains("base_seed")) base_seed = j["base_seed"].get<std::uint64_t>();
        if (j.contains("suite_seed")) suite_seed = j["suite_seed"].get<std::uint64_t>();
        if (j.contains("separable_size")) separable_size = j["separable_size"].get<std::size_t>();
        if (j.contains("population")) population = j["population"].get<std::size_t>();
        if (j.contains("reevaluations")) reevaluations = j["reevaluations"].get<std::size_t>();
        if (j.contains("archive_factor")) archive_factor = j["archive_factor"].get<double>();
        if (j.contains("visit_length")) visit_length = j["visit_length"].get<std::size_t>();
        if (j.contains("charge_reevaluation")) charge_reevaluation = j["charge_reevaluation"].get<bool>();
        if (j.contains("jobs")) jobs = j["jobs"].get<std::size_t>();
        if (j.contains("output_dir")) output_dir = j["output_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ContractViolation(std::string("config: ") + e.what());
    }
}

std::size_t separable_size_for(const ExperimentConfig& config, const BenchmarkFunction& fn) {
    if (config.separable_size > 0) {
        return config.separable_size;
    }
    for (const auto& group : fn.structure().groups) {
        if (group.kind == GroupKind::nonseparable_rotated) {
            return 100;
        }
    }
    return 20;
}

namespace {

Decomposition decomposition_for(const ExperimentConfig& config, const BenchmarkFunction& fn) {
    return ideal_decompose(fn.structure(), fn.bounds(), separable_size_for(config, fn));
}

SaccParams sacc_params(const ExperimentConfig& config) {
    SaccParams params;
    params.population = config.population;
    params.reevaluations = config.reevaluations;
    params.archive_factor = config.archive_factor;
    return params;
}

ShadeCcParams cc_params(const ExperimentConfig& config) {
    ShadeCcParams params;
    params.population = config.population;
    params.visit_length = config.visit_length;
    params.charge_reevaluation = config.charge_reevaluation;
    return params;
}

}  // namespace

std::size_t minimum_budget(const ExperimentConfig& config, const BenchmarkFunction& fn) {
    if (config.algorithm == Algorithm::shade_cc) {
        return 1;
    }
    return SaccOptimizer::initialization_cost(decomposition_for(config, fn), sacc_params(config));
}

RunRecord run_trial(const ExperimentConfig& config, const BenchmarkFunction& fn, std::uint64_t seed) {
    Decomposition decomposition = decomposition_for(config, fn);
    if (config.algorithm == Algorithm::sacc) {
        SaccOptimizer optimizer(fn, std::move(decomposition), sacc_params(config), seed, config.budget);
        return optimizer.run();
    }
    return run_cc(fn, std::move(decomposition), cc_params(config), seed, config.budget);
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats stats;
    stats.n = values.size();
    if (values.empty()) {
        return stats;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    stats.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - stats.mean) * (v - stats.mean);
        }
        stats.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return stats;
}

SummaryRow summarize(std::string function_id, std::size_t budget, std::span<const double> finals) {
    if (finals.empty()) {
        throw ContractViolation("summarize: no runs");
    }
    std::vector<double> sorted(finals.begin(), finals.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const SampleStats stats = sample_stats(finals);

    SummaryRow row;
    row.function_id = std::move(function_id);
    row.budget = budget;
    row.best = sorted.front();
    row.worst = sorted.back();
    row.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    row.mean = stats.mean;
    row.std = stats.std;
    return row;
}

std::string_view to_string(EffectLabel label) {
    switch (label) {
        case EffectLabel::similar: return "similar";
        case EffectLabel::small: return "small";
        case EffectLabel::medium: return "medium";
        case EffectLabel::large: return "large";
    }
    return "similar";
}

EffectSize cohens_d(const SampleStats& a, const SampleStats& b) {
    if (a.n != b.n || a.n < 2) {
        throw ContractViolation("cohens_d: samples must have equal size >= 2");
    }
    if (!std::isfinite(a.std) || !std::isfinite(b.std) || !std::isfinite(a.mean) || !std::isfinite(b.mean)) {
        throw ContractViolation("cohens_d: non-finite sample statistics");
    }
    const double pooled = std::sqrt((a.std * a.std + b.std * b.std) / 2.0);
    const double diff = a.mean - b.mean;
    EffectSize out;
    if (pooled == 0.0) {
        if (diff == 0.0) {
            return out;
        }
        out.d = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        out.label = EffectLabel::large;
        return out;
    }
    out.d = diff / pooled;
    const double magnitude = std::abs(out.d);
    if (magnitude >= 0.8) {
        out.label = EffectLabel::large;
    } else if (magnitude >= 0.3) {
        out.label = EffectLabel::medium;
    } else if (magnitude >= 0.2) {
        out.label = EffectLabel::small;
    } else {
        out.label = EffectLabel::similar;
    }
    return out;
}

std::vector<CurvePoint> mean_curve(std::span<const RunRecord> runs) {
    if (runs.empty()) {
        throw ContractViolation("mean_curve: no runs");
    }
    std::size_t start = 0;
    std::vector<std::size_t> grid;
    for (const auto& run : runs) {
        if (run.trace.empty()) {
            throw ContractViolation("mean_curve: empty trace");
        }
        start = std::max(start, run.trace.front().fes);
        for (const auto& row : run.trace) {
            grid.push_back(row.fes);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.erase(grid.begin(), std::lower_bound(grid.begin(), grid.end(), start));

    std::vector<std::size_t> cursor(runs.size(), 0);
    std::vector<double> values(runs.size());
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (std::size_t fe : grid) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const auto& trace = runs[r].trace;
            while (cursor[r] + 1 < trace.size() && trace[cursor[r] + 1].fes <= fe) {
                ++cursor[r];
            }
            values[r] = trace[cursor[r]].f;
        }
        const SampleStats stats = sample_stats(values);
        curve.push_back({fe, stats.mean, stats.std});
    }
    return curve;
}

std::optional<std::size_t> fes_to_match(double target, std::span<const CurvePoint> curve) {
    if (curve.empty()) {
        throw ContractViolation("fes_to_match: empty baseline curve");
    }
    for (const auto& point : curve) {
        if (point.mean <= target) {
            return point.fe;
        }
    }
    return std::nullopt;
}

ExperimentResult run_single(const ExperimentConfig& config, const BenchmarkFunction& fn) {
    config.validate();
    const std::size_t min_budget = minimum_budget(config, fn);
    if (config.budget < min_budget) {
        throw ContractViolation("config: budget " + std::to_string(config.budget) +
                                " is below the initialization cost " + std::to_string(min_budget));
    }

    ExperimentResult result;
    result.function_id = fn.id();
    result.algorithm = config.algorithm;
    result.decomposition_json = decomposition_for(config, fn).to_json();
    for (std::size_t r = 0; r < config.runs; ++r) {
        result.seeds.push_back(config.base_seed + r);
    }
    result.runs.resize(config.runs);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < config.runs; r = next++) {
            result.runs[r] = run_trial(config, fn, result.seeds[r]);
        }
    };
    const std::size_t threads = std::min(config.jobs, config.runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    std::vector<double> finals;
    for (const auto& run : result.runs) {
        finals.push_back(run.best_f);
    }
    result.summary = summarize(fn.id(), config.budget, finals);
    return result;
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<ExperimentResult> results;
    for (const auto& id : config.functions) {
        const BenchmarkFunction fn = make_function(parse_function_id(id), config.dimension, config.suite_seed);
        results.push_back(run_single(config, fn));
    }
    write_results(config, results);
    return results;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trace_csv(const RunRecord& record) {
    std::string out = "generation,subproblem,fes,fv\n";
    for (const auto& row : record.trace) {
        out += std::to_string(row.generation);
        out += ',';
        out += std::to_string(row.subproblem);
        out += ',';
        out += std::to_string(row.fes);
        out += ',';
        out += format_double(row.f);
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string result_stem(Algorithm algorithm, std::string_view function_id) {
    return std::string(to_string(algorithm)) + "_" + std::string(function_id);
}

void export_convergence(std::span<const CurvePoint> curve, const std::filesystem::path& path) {
    if (curve.empty()) {
        throw ContractViolation("export_convergence: empty curve");
    }
    std::string out = "fe,mean_fv,std_fv\n";
    for (const auto& point : curve) {
        out += std::to_string(point.fe) + "," + format_double(point.mean) + "," + format_double(point.std) + "\n";
    }
    write_text(path, out);
}

void write_results(const ExperimentConfig& config, std::span<const ExperimentResult> results) {
    const std::filesystem::path dir(config.output_dir);
    std::string summary = "algorithm,function,budget,best,median,worst,mean,std\n";
    nlohmann::json functions = nlohmann::json::array();

    for (const auto& result : results) {
        const std::string stem = result_stem(result.algorithm, result.function_id);
        std::string finals = "seed,final_fv,fes_used\n";
        for (std::size_t r = 0; r < result.runs.size(); ++r) {
            write_text(dir / (stem + "_trace_seed" + std::to_string(result.seeds[r]) + ".csv"),
                       trace_csv(result.runs[r]));
            finals += std::to_string(result.seeds[r]) + "," + format_double(result.runs[r].best_f) + "," +
                      std::to_string(result.runs[r].fes_used) + "\n";
        }
        write_text(dir / (stem + "_finals.csv"), finals);
        export_convergence(mean_curve(result.runs), dir / (stem + "_convergence.csv"));

        const SummaryRow& row = result.summary;
        summary += std::string(to_string(result.algorithm)) + "," + row.function_id + "," +
                   std::to_string(row.budget) + "," + format_double(row.best) + "," + format_double(row.median) +
                   "," + format_double(row.worst) + "," + format_double(row.mean) + "," + format_double(row.std) +
                   "\n";

        const BenchmarkFunction fn =
            make_function(parse_function_id(result.function_id), config.dimension, config.suite_seed);
        functions.push_back({{"id", result.function_id},
                             {"benchmark", nlohmann::json::parse(function_manifest_json(fn))},
                             {"separable_size", separable_size_for(config, fn)},
                             {"decomposition", nlohmann::json::parse(result.decomposition_json)},
                             {"seeds", result.seeds}});
    }
    write_text(dir / (std::string(to_string(config.algorithm)) + "_summary.csv"), summary);

    nlohmann::json manifest = {
        {"code_version", code_version()},
        {"config", nlohmann::json::parse(config.to_json())},
        {"functions", functions},
        {"effect_size", "cohen d = (mean_a - mean_b) / sqrt((std_a^2 + std_b^2) / 2)"},
        {"schemas",
         {{"trace", "generation,subproblem,fes,fv"},
          {"finals", "seed,final_fv,fes_used"},
          {"summary", "algorithm,function,budget,best,median,worst,mean,std"},
          {"convergence", "fe,mean_fv,std_fv"}}}};
    write_text(dir / (std::string(to_string(config.algorithm)) + "_manifest.json"), manifest.dump(2) + "\n");
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty() && cell.back() == '\r') {
                cell.pop_back();
            }
            cells.push_back(cell);
        }
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path.string() + " is empty");
    }
    header = split(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            rows.push_back(split(line));
        }
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name,
                   const std::filesystem::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::runtime_error(path.string() + " has no '" + std::string(name) + "' column");
    }
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<CurvePoint> read_convergence_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv(path, header);
    const std::size_t fe = column(header, "fe", path);
    const std::size_t mean = column(header, "mean_fv", path);
    const std::size_t std_col = column(header, "std_fv", path);
    std::vector<CurvePoint> curve;
    for (const auto& row : rows) {
        curve.push_back({static_cast<std::size_t>(std::stoull(row.at(fe))), std::stod(row.at(mean)),
                         std::stod(row.at(std_col))});
    }
    return curve;
}

std::vector<double> read_finals_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv(path, header);
    const std::size_t col = column(header, "final_fv", path);
    std::vector<double> values;
    for (const auto& row : rows) {
        values.push_back(std::stod(row.at(col)));
    }
    return values;
}

void export_convergence_svg(const std::map<std::string, std::vector<CurvePoint>>& curves,
                            const std::filesystem::path& path) {
    if (curves.empty()) {
        throw ContractViolation("export_convergence_svg: no curves");
    }
    constexpr double width = 720.0;
    constexpr double height = 440.0;
    constexpr double margin = 60.0;
    double max_fe = 1.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [name, curve] : curves) {
        for (const auto& point : curve) {
            max_fe = std::max(max_fe, static_cast<double>(point.fe));
            const double y = std::log10(std::max(point.mean, 1e-300));
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-9) {
        hi = lo + 1.0;
    }
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">FEs (max "
        << static_cast<std::size_t>(max_fe) << ")</text>\n"
        << "<text x=\"15\" y=\"" << margin - 20 << "\">log10 mean FV [" << format_double(lo).substr(0, 6) << ", "
        << format_double(hi).substr(0, 6) << "]</text>\n";
    std::size_t k = 0;
    for (const auto& [name, curve] : curves) {
        const char* color = colors[k % std::size(colors)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& point : curve) {
            const double x = margin + (width - 2 * margin) * static_cast<double>(point.fe) / max_fe;
            const double y = height - margin -
                             (height - 2 * margin) * (std::log10(std::max(point.mean, 1e-300)) - lo) / (hi - lo);
            svg << x << "," << y << " ";
        }
        svg << "\"/>\n<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 20 * static_cast<double>(k)
            << "\" fill=\"" << color << "\">" << name << "</text>\n";
        ++k;
    }
    svg << "</svg>\n";
    write_text(path, svg.str());
}

}  // namespace sacc
