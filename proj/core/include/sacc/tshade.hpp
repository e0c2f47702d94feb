#pragma once

#include "sacc/population.hpp"
#include "sacc/types.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sacc {

struct ShadeSettings {
    std::size_t memory_size = 10;     // H
    double pbest_max_fraction = 0.2;  // pbest fraction ~ U[2/p, this]
    double scale_spread = 0.1;        // Cauchy scale for F
    double crossover_spread = 0.1;    // Normal sigma for CR
};

struct ControlParams {
    double scale_factor = 0.5;    // F
    double crossover_rate = 0.5;  // CR
};

/// One successful trial: the losing parent, the parameters that produced
/// the winner and the weight used for the memory update.
struct SuccessRecord {
    Vector parent;
    double scale_factor = 0.0;
    double crossover_rate = 0.0;
    double weight = 0.0;
};

/// Success-history memory (M_F, M_CR), H entries initialized to 0.5.
class ParameterMemory {
public:
    explicit ParameterMemory(std::size_t size = 10);

    std::size_t size() const { return scale_.size(); }
    double scale_factor(std::size_t k) const { return scale_[k]; }
    double crossover_rate(std::size_t k) const { return crossover_[k]; }
    std::size_t write_index() const { return write_; }

    /// Writes (weighted Lehmer mean of F, weighted mean of CR) at the write
    /// index and advances it. No-op when `successes` is empty.
    void record(std::span<const SuccessRecord> successes);

    bool operator==(const ParameterMemory&) const = default;

private:
    std::vector<double> scale_;
    std::vector<double> crossover_;
    std::size_t write_ = 0;
};

/// Fixed-size store of inferior sub-solutions (A_g); always full.
class InferiorArchive {
public:
    InferiorArchive() = default;
    explicit InferiorArchive(std::vector<Vector> slots);

    std::size_t size() const { return slots_.size(); }
    const Vector& operator[](std::size_t i) const { return slots_[i]; }
    void replace(std::size_t i, Vector x);
    void replace_random(Vector x, Rng& rng);

private:
    std::vector<Vector> slots_;
};

/// Cauchy draw for F: nullopt asks for a resample (draw <= 0), otherwise
/// the draw truncated to 1.
std::optional<double> accept_scale_factor(double draw);
/// Normal draw for CR clipped to [0, 1].
double clip_crossover_rate(double draw);

ControlParams sample_params(const ParameterMemory& memory, Rng& rng, const ShadeSettings& settings = {});

/// Random choices behind one current-to-pbest/1/bin trial.
struct MutationDraws {
    std::size_t pbest = 0;  // member index
    std::size_t r1 = 0;     // member index
    std::size_t r2 = 0;     // < p: member, otherwise archive slot r2 - p
    std::size_t j_rand = 0;
    std::vector<double> crossover_uniforms;  // one U(0,1) per component
};

MutationDraws draw_mutation(const SubPopulation& pop, const InferiorArchive& archive, std::size_t i,
                            double pbest_fraction, Rng& rng);

/// v = x_i + F (x_pbest - x_i) + F (x_r1 - x~_r2), binomial crossover with a
/// forced j_rand component, then midpoint repair of out-of-box components
/// toward the parent.
Vector apply_mutation(const SubPopulation& pop, const InferiorArchive& archive, std::size_t i,
                      const ControlParams& params, const MutationDraws& draws, std::span<const Bounds> bounds);

Vector mutate_crossover(const SubPopulation& pop, const InferiorArchive& archive, const ControlParams& params,
                        std::size_t i, double pbest_fraction, std::span<const Bounds> bounds, Rng& rng);

struct TrialBatch {
    std::vector<Vector> trials;
    std::vector<ControlParams> params;
};

/// One trial per population member.
TrialBatch generate_trials(const SubPopulation& pop, const InferiorArchive& archive, const ParameterMemory& memory,
                           std::span<const Bounds> bounds, const ShadeSettings& settings, Rng& rng);

using Predictor = std::function<double(std::span<const double>)>;
/// Real improvement of a sub-solution; nullopt once the FE budget is spent.
using RealEvaluator = std::function<std::optional<double>(std::span<const double>)>;

struct SelectionOutcome {
    Vector parent_values;                  // surrogate value of each parent
    Vector trial_values;                   // surrogate value, overwritten by the real one when reevaluated
    std::vector<std::size_t> reevaluated;  // trial indices in selection order
    std::vector<bool> success;
    bool truncated = false;

    std::size_t num_successes() const;
};

/// Scores parents and trials with the surrogate, reevaluates the q trials
/// with the largest surrogate value (ties to the lower index) and marks
/// trial i successful iff its (possibly overwritten) value beats its
/// parent's surrogate value.
SelectionOutcome two_step_select(const SubPopulation& pop, const TrialBatch& batch, const Predictor& surrogate,
                                 const RealEvaluator& real_eval, std::size_t q);

/// Pairs every success with its parent and parameters; weight is the value
/// margin trial - parent.
std::vector<SuccessRecord> collect_successes(const SubPopulation& pop, const TrialBatch& batch,
                                             const SelectionOutcome& outcome);

/// Overwrites a random A_g slot with each losing parent, then records the
/// successful parameters in the memory.
void update_success_state(ParameterMemory& memory, InferiorArchive& archive,
                          std::span<const SuccessRecord> successes, Rng& rng);

/// For each candidate in turn, replaces the current worst member when the
/// candidate's improvement is strictly larger. Returns the number replaced.
std::size_t worst_replacement(SubPopulation& pop, std::span<const Individual> candidates);

}  // namespace sacc
