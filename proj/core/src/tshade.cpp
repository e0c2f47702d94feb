#include "sacc/tshade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sacc {

ParameterMemory::ParameterMemory(std::size_t size) : scale_(size, 0.5), crossover_(size, 0.5) {
    if (size == 0) {
        throw ContractViolation("parameter memory needs at least one entry");
    }
}

void ParameterMemory::record(std::span<const SuccessRecord> successes) {
    if (successes.empty()) {
        return;
    }
    double weight_sum = 0.0;
    for (const auto& s : successes) {
        weight_sum += s.weight;
    }
    double f_num = 0.0;
    double f_den = 0.0;
    double cr_mean = 0.0;
    for (const auto& s : successes) {
        const double w = weight_sum > 0.0 ? s.weight / weight_sum : 1.0 / static_cast<double>(successes.size());
        f_num += w * s.scale_factor * s.scale_factor;
        f_den += w * s.scale_factor;
        cr_mean += w * s.crossover_rate;
    }
    if (f_den > 0.0) {
        scale_[write_] = std::clamp(f_num / f_den, std::numeric_limits<double>::min(), 1.0);
    }
    crossover_[write_] = std::clamp(cr_mean, 0.0, 1.0);
    write_ = (write_ + 1) % scale_.size();
}

InferiorArchive::InferiorArchive(std::vector<Vector> slots) : slots_(std::move(slots)) {
    if (slots_.empty()) {
        throw ContractViolation("inferior archive must not be empty");
    }
}

void InferiorArchive::replace(std::size_t i, Vector x) {
    if (i >= slots_.size()) {
        throw ContractViolation("inferior archive slot out of range");
    }
    slots_[i] = std::move(x);
}

void InferiorArchive::replace_random(Vector x, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, slots_.size() - 1);
    slots_[pick(rng)] = std::move(x);
}

std::optional<double> accept_scale_factor(double draw) {
    if (!(draw > 0.0)) {
        return std::nullopt;
    }
    return std::min(draw, 1.0);
}

double clip_crossover_rate(double draw) { return std::clamp(draw, 0.0, 1.0); }

ControlParams sample_params(const ParameterMemory& memory, Rng& rng, const ShadeSettings& settings) {
    std::uniform_int_distribution<std::size_t> pick(0, memory.size() - 1);
    const std::size_t r = pick(rng);
    std::cauchy_distribution<double> cauchy(memory.scale_factor(r), settings.scale_spread);
    std::normal_distribution<double> normal(memory.crossover_rate(r), settings.crossover_spread);

    ControlParams out;
    out.crossover_rate = clip_crossover_rate(normal(rng));
    for (;;) {
        if (auto f = accept_scale_factor(cauchy(rng))) {
            out.scale_factor = *f;
            break;
        }
    }
    return out;
}

MutationDraws draw_mutation(const SubPopulation& pop, const InferiorArchive& archive, std::size_t i,
                            double pbest_fraction, Rng& rng) {
    const std::size_t p = pop.size();
    if (p < SubPopulation::min_size) {
        throw ContractViolation("mutation needs at least four members");
    }
    if (i >= p) {
        throw ContractViolation("mutation: member index out of range");
    }
    MutationDraws draws;
    const auto top = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(pbest_fraction * static_cast<double>(p) - 1e-12)), 1, p);
    const std::vector<std::size_t> ranking = pop.ranking();
    std::uniform_int_distribution<std::size_t> pick_best(0, top - 1);
    draws.pbest = ranking[pick_best(rng)];

    std::uniform_int_distribution<std::size_t> pick_member(0, p - 1);
    do {
        draws.r1 = pick_member(rng);
    } while (draws.r1 == i);

    std::uniform_int_distribution<std::size_t> pick_union(0, p + archive.size() - 1);
    do {
        draws.r2 = pick_union(rng);
    } while (draws.r2 == i || draws.r2 == draws.r1);

    const std::size_t dim = pop[i].x.size();
    std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
    draws.j_rand = pick_dim(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    draws.crossover_uniforms.resize(dim);
    for (auto& u : draws.crossover_uniforms) {
        u = unit(rng);
    }
    return draws;
}

Vector apply_mutation(const SubPopulation& pop, const InferiorArchive& archive, std::size_t i,
                      const ControlParams& params, const MutationDraws& draws, std::span<const Bounds> bounds) {
    const Vector& x = pop[i].x;
    const Vector& best = pop[draws.pbest].x;
    const Vector& r1 = pop[draws.r1].x;
    const Vector& r2 = draws.r2 < pop.size() ? pop[draws.r2].x : archive[draws.r2 - pop.size()];
    const double f = params.scale_factor;

    Vector trial(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j == draws.j_rand || draws.crossover_uniforms[j] <= params.crossover_rate) {
            double v = x[j] + f * (best[j] - x[j]) + f * (r1[j] - r2[j]);
            if (v < bounds[j].lower) {
                v = (bounds[j].lower + x[j]) / 2.0;
            } else if (v > bounds[j].upper) {
                v = (bounds[j].upper + x[j]) / 2.0;
            }
            trial[j] = v;
        } else {
            trial[j] = x[j];
        }
    }
    return trial;
}

Vector mutate_crossover(const SubPopulation& pop, const InferiorArchive& archive, const ControlParams& params,
                        std::size_t i, double pbest_fraction, std::span<const Bounds> bounds, Rng& rng) {
    if (bounds.size() != pop[0].x.size()) {
        throw ContractViolation("mutation: bounds do not match sub-problem dimension");
    }
    const MutationDraws draws = draw_mutation(pop, archive, i, pbest_fraction, rng);
    return apply_mutation(pop, archive, i, params, draws, bounds);
}

TrialBatch generate_trials(const SubPopulation& pop, const InferiorArchive& archive, const ParameterMemory& memory,
                           std::span<const Bounds> bounds, const ShadeSettings& settings, Rng& rng) {
    const std::size_t p = pop.size();
    const double min_fraction = 2.0 / static_cast<double>(p);
    const double max_fraction = std::max(min_fraction, settings.pbest_max_fraction);
    std::uniform_real_distribution<double> fraction(min_fraction, max_fraction);

    TrialBatch batch;
    batch.trials.reserve(p);
    batch.params.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        const ControlParams params = sample_params(memory, rng, settings);
        const double pbest_fraction = fraction(rng);
        batch.trials.push_back(mutate_crossover(pop, archive, params, i, pbest_fraction, bounds, rng));
        batch.params.push_back(params);
    }
    return batch;
}

std::size_t SelectionOutcome::num_successes() const {
    return static_cast<std::size_t>(std::count(success.begin(), success.end(), true));
}

SelectionOutcome two_step_select(const SubPopulation& pop, const TrialBatch& batch, const Predictor& surrogate,
                                 const RealEvaluator& real_eval, std::size_t q) {
    const std::size_t p = pop.size();
    if (batch.trials.size() != p) {
        throw ContractViolation("two_step_select: one trial per member required");
    }
    if (q == 0 || q > p) {
        throw ContractViolation("two_step_select: q must be in [1, p]");
    }

    SelectionOutcome out;
    out.parent_values.resize(p);
    out.trial_values.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        out.parent_values[i] = surrogate(pop[i].x);
        out.trial_values[i] = surrogate(batch.trials[i]);
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.trial_values[a] > out.trial_values[b]; });
    for (std::size_t k = 0; k < q; ++k) {
        const std::size_t idx = order[k];
        const std::optional<double> real = real_eval(batch.trials[idx]);
        if (!real) {
            out.truncated = true;
            break;
        }
        out.trial_values[idx] = *real;
        out.reevaluated.push_back(idx);
    }

    out.success.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        out.success[i] = out.trial_values[i] > out.parent_values[i];
    }
    return out;
}

std::vector<SuccessRecord> collect_successes(const SubPopulation& pop, const TrialBatch& batch,
                                             const SelectionOutcome& outcome) {
    std::vector<SuccessRecord> records;
    for (std::size_t i = 0; i < outcome.success.size(); ++i) {
        if (!outcome.success[i]) {
            continue;
        }
        records.push_back({pop[i].x, batch.params[i].scale_factor, batch.params[i].crossover_rate,
                           outcome.trial_values[i] - outcome.parent_values[i]});
    }
    return records;
}

void update_success_state(ParameterMemory& memory, InferiorArchive& archive,
                          std::span<const SuccessRecord> successes, Rng& rng) {
    for (const auto& s : successes) {
        archive.replace_random(s.parent, rng);
    }
    memory.record(successes);
}

std::size_t worst_replacement(SubPopulation& pop, std::span<const Individual> candidates) {
    std::size_t replaced = 0;
    for (const auto& candidate : candidates) {
        const std::size_t worst = pop.worst_index();
        if (pop[worst].improvement < candidate.improvement) {
            pop.replace(worst, candidate);
            ++replaced;
        }
    }
    return replaced;
}

}  // namespace sacc
