#include "sacc/shade_cc.hpp"

namespace sacc {

ShadeCcOptimizer::ShadeCcOptimizer(const Objective& objective, Decomposition decomposition, ShadeCcParams params,
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
    if (params_.visit_length == 0) {
        throw ContractViolation("visit length must be positive");
    }
    if (max_fes < 1) {
        throw ContractViolation("budget must cover the initial context evaluation");
    }

    context_.x = uniform_point(objective_.bounds(), coordinator_rng_);
    budget_.try_charge();
    context_.f = objective_.evaluate(context_.x);
    scratch_ = context_.x;

    const std::size_t p = params_.population;
    for (std::size_t g = 0; g < decomposition_.size(); ++g) {
        const SubProblem& sub = decomposition_[g];
        Rng rng(derive_seed(seed, g + 1));
        std::vector<Vector> inferior;
        std::vector<Individual> members;
        for (std::size_t i = 0; i < p; ++i) {
            inferior.push_back(uniform_point(sub.bounds, rng));
        }
        for (std::size_t i = 0; i < p; ++i) {
            members.push_back({uniform_point(sub.bounds, rng), 0.0});
        }
        states_.push_back({SubPopulation(std::move(members)), ParameterMemory(params_.shade.memory_size),
                           InferiorArchive(std::move(inferior)), std::move(rng)});
    }
    trace_.push_back({0, -1, budget_.used(), context_.f});
}

std::optional<double> ShadeCcOptimizer::evaluate_subsolution(std::size_t g, std::span<const double> x_g,
                                                             double reference, bool charge) {
    if (charge && !budget_.try_charge()) {
        return std::nullopt;
    }
    scratch_ = context_.x;
    embed_into(scratch_, decomposition_[g], x_g);
    return reference - objective_.evaluate(scratch_);
}

std::size_t ShadeCcOptimizer::visit() {
    if (finished()) {
        throw ContractViolation("visit: the FE budget is exhausted");
    }
    const std::size_t g = cursor_;
    const SubProblem& sub = decomposition_[g];
    State& state = states_[g];
    const std::size_t p = params_.population;

    // Only the g-component of x* changes during a visit, so values measured
    // against this reference stay commensurable for the whole visit.
    const double reference = context_.f;

    for (std::size_t i = 0; i < p; ++i) {
        const auto e = evaluate_subsolution(g, state.population[i].x, reference, params_.charge_reevaluation);
        if (!e) {
            finished_ = true;
            return 0;
        }
        state.population.set_improvement(i, *e);
    }

    std::size_t completed = 0;
    for (std::size_t gen = 0; gen < params_.visit_length && !finished(); ++gen) {
        TrialBatch batch = generate_trials(state.population, state.inferior, state.memory, sub.bounds,
                                           params_.shade, state.rng);
        std::vector<std::optional<double>> values(p);
        for (std::size_t i = 0; i < p; ++i) {
            values[i] = evaluate_subsolution(g, batch.trials[i], reference, true);
            if (!values[i]) {
                finished_ = true;
                break;
            }
        }

        std::vector<SuccessRecord> successes;
        std::vector<std::size_t> replacements;
        for (std::size_t i = 0; i < p; ++i) {
            if (!values[i]) {
                continue;
            }
            const double parent = state.population[i].improvement;
            if (*values[i] > parent) {
                successes.push_back({state.population[i].x, batch.params[i].scale_factor,
                                     batch.params[i].crossover_rate, *values[i] - parent});
            }
            if (*values[i] >= parent) {
                replacements.push_back(i);
            }
        }
        update_success_state(state.memory, state.inferior, successes, state.rng);
        for (std::size_t i : replacements) {
            state.population.replace(i, {std::move(batch.trials[i]), *values[i]});
        }

        const Individual& best = state.population[state.population.best_index()];
        const double candidate_f = reference - best.improvement;
        if (candidate_f < context_.f) {
            embed_into(context_.x, sub, best.x);
            context_.f = candidate_f;
            ++context_.version;
        }

        ++generation_;
        trace_.push_back({generation_, static_cast<long>(g), budget_.used(), context_.f});
        if (!finished_) {
            ++completed;
        }
    }

    ++visits_;
    cursor_ = (cursor_ + 1) % decomposition_.size();
    return completed;
}

RunRecord ShadeCcOptimizer::run() {
    while (!finished()) {
        visit();
    }
    RunRecord record;
    record.trace = trace_;
    record.best_x = context_.x;
    record.best_f = context_.f;
    record.fes_used = budget_.used();
    record.generations = generation_;
    return record;
}

RunRecord run_cc(const Objective& objective, Decomposition decomposition, const ShadeCcParams& params,
                 std::uint64_t seed, std::size_t max_fes) {
    ShadeCcOptimizer optimizer(objective, std::move(decomposition), params, seed, max_fes);
    return optimizer.run();
}

}  // namespace sacc
