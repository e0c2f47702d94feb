#include "sacc/sacc.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace sacc {

std::size_t archive_capacity(const SaccParams& params, std::size_t s) {
    return static_cast<std::size_t>(std::llround(params.archive_factor * static_cast<double>(s)));
}

std::size_t SaccOptimizer::initialization_cost(const Decomposition& decomposition, const SaccParams& params) {
    std::size_t cost = 1;
    for (const auto& sub : decomposition.subproblems()) {
        cost += std::max(archive_capacity(params, sub.dim()), params.population);
    }
    return cost;
}

SaccOptimizer::SaccOptimizer(const Objective& objective, Decomposition decomposition, SaccParams params,
                             std::uint64_t seed, std::size_t max_fes)
    : objective_(objective),
      decomposition_(std::move(decomposition)),
      params_(std::move(params)),
      budget_(max_fes),
      coordinator_rng_(derive_seed(seed, 0)) {
    if (decomposition_.n() != objective_.dimension()) {
        throw ContractViolation("decomposition dimension does not match the objective");
    }
    if (params_.population < SubPopulation::min_size) {
        throw ContractViolation("population size must be at least 4");
    }
    if (params_.reevaluations == 0 || params_.reevaluations > params_.population) {
        throw ContractViolation("q must be in [1, p]");
    }
    for (const auto& sub : decomposition_.subproblems()) {
        if (archive_capacity(params_, sub.dim()) < sub.dim() + 1) {
            throw ContractViolation("archive size d must be at least s + 1");
        }
    }
    const std::size_t init_cost = initialization_cost(decomposition_, params_);
    if (max_fes < init_cost) {
        throw ContractViolation("budget of " + std::to_string(max_fes) + " FEs is below the initialization cost " +
                                std::to_string(init_cost));
    }

    const auto bounds = objective_.bounds();
    context_.x = uniform_point(bounds, coordinator_rng_);
    budget_.try_charge();
    context_.f = objective_.evaluate(context_.x);
    scratch_ = context_.x;

    const std::size_t p = params_.population;
    states_.reserve(decomposition_.size());
    for (std::size_t g = 0; g < decomposition_.size(); ++g) {
        const SubProblem& sub = decomposition_[g];
        Rng rng(derive_seed(seed, g + 1));

        std::vector<Vector> inferior;
        inferior.reserve(p);
        for (std::size_t i = 0; i < p; ++i) {
            inferior.push_back(uniform_point(sub.bounds, rng));
        }

        const std::size_t d = archive_capacity(params_, sub.dim());
        const std::size_t pool_size = std::max(d, p);
        std::vector<Individual> pool;
        pool.reserve(pool_size);
        for (std::size_t i = 0; i < pool_size; ++i) {
            Vector x = uniform_point(sub.bounds, rng);
            const double e = *real_improvement(g, x);
            pool.push_back({std::move(x), e});
        }

        TrainingArchive archive(d, sub.bounds);
        for (std::size_t i = pool_size - d; i < pool_size; ++i) {
            archive.push(pool[i].x, pool[i].improvement);
        }

        std::vector<std::size_t> order(pool_size);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pool[a].improvement > pool[b].improvement; });
        std::vector<Individual> members;
        members.reserve(p);
        for (std::size_t k = 0; k < p; ++k) {
            members.push_back(pool[order[k]]);
        }

        states_.push_back({std::move(archive), SubPopulation(std::move(members)),
                           ParameterMemory(params_.shade.memory_size), InferiorArchive(std::move(inferior)),
                           std::move(rng)});
    }

    trace_.push_back({0, -1, budget_.used(), context_.f});
}

std::optional<double> SaccOptimizer::real_improvement(std::size_t g, std::span<const double> x_g) {
    if (g >= decomposition_.size()) {
        throw ContractViolation("real_improvement: sub-problem index out of range");
    }
    if (!budget_.try_charge()) {
        return std::nullopt;
    }
    const SubProblem& sub = decomposition_[g];
    scratch_ = context_.x;
    embed_into(scratch_, sub, x_g);
    return context_.f - objective_.evaluate(scratch_);
}

double SaccOptimizer::audit_improvement(std::size_t g, std::span<const double> x_g) const {
    const Vector candidate = embed(context_.x, decomposition_[g], x_g);
    return context_.f - objective_.evaluate(candidate);
}

GenerationReport SaccOptimizer::step() { return generation(cursor_, nullptr); }

GenerationReport SaccOptimizer::step_with(const Predictor& surrogate) { return generation(cursor_, &surrogate); }

GenerationReport SaccOptimizer::generation(std::size_t g, const Predictor* surrogate) {
    if (finished()) {
        throw ContractViolation("step: fewer than q FEs remain in the budget");
    }
    SubproblemState& state = states_[g];
    const SubProblem& sub = decomposition_[g];

    GenerationReport report;
    report.subproblem = g;
    report.fes_before = budget_.used();

    Predictor predictor;
    if (surrogate != nullptr) {
        predictor = *surrogate;
    } else {
        try {
            auto model = std::make_shared<const RbfModel>(train(state.archive));
            report.model_regularized = model->regularized();
            predictor = [model](std::span<const double> x) { return model->predict(x); };
        } catch (const TrainingError&) {
            // No usable model: every trial scores 0, so the q reevaluated
            // trials are taken in index order.
            report.model_failed = true;
            predictor = [](std::span<const double>) { return 0.0; };
        }
    }

    report.batch = generate_trials(state.population, state.inferior, state.memory, sub.bounds, params_.shade,
                                   state.rng);
    report.trials = report.batch.trials.size();

    const RealEvaluator real_eval = [this, g](std::span<const double> x) { return real_improvement(g, x); };
    report.selection =
        two_step_select(state.population, report.batch, predictor, real_eval, params_.reevaluations);
    report.real_evaluations = report.selection.reevaluated.size();
    report.truncated = report.selection.truncated;

    const std::vector<SuccessRecord> successes =
        collect_successes(state.population, report.batch, report.selection);
    report.successes = successes.size();
    update_success_state(state.memory, state.inferior, successes, state.rng);

    std::vector<Sample> samples;
    std::vector<Individual> candidates;
    samples.reserve(report.real_evaluations);
    candidates.reserve(report.real_evaluations);
    for (std::size_t idx : report.selection.reevaluated) {
        samples.push_back({report.batch.trials[idx], report.selection.trial_values[idx]});
        candidates.push_back({report.batch.trials[idx], report.selection.trial_values[idx]});
    }
    state.archive.push_real_samples(samples);
    worst_replacement(state.population, candidates);

    const Individual& best = state.population[state.population.best_index()];
    if (best.improvement > 0.0) {
        const double delta = best.improvement;
        embed_into(context_.x, sub, best.x);
        context_.f -= delta;
        ++context_.version;
        rebase(state.archive, state.population, delta);
        report.context_updated = true;
        report.delta = delta;
        if (params_.audit) {
            const double truth = objective_.evaluate(context_.x);
            report.audit_relative_error = std::abs(truth - context_.f) / std::max(1.0, std::abs(truth));
        }
    }

    ++generation_;
    report.generation = generation_;
    report.fes_after = budget_.used();
    if (report.truncated) {
        finished_ = true;
    }
    cursor_ = (cursor_ + 1) % decomposition_.size();
    trace_.push_back({generation_, static_cast<long>(g), budget_.used(), context_.f});
    return report;
}

RunRecord SaccOptimizer::run() {
    while (!finished()) {
        step();
    }
    RunRecord record;
    record.trace = trace_;
    record.best_x = context_.x;
    record.best_f = context_.f;
    record.fes_used = budget_.used();
    record.generations = generation_;
    return record;
}

}  // namespace sacc
