#pragma once

#include "sacc/decomposition.hpp"
#include "sacc/population.hpp"
#include "sacc/rbf.hpp"
#include "sacc/tshade.hpp"
#include "sacc/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sacc {

/// Strict counter of real objective evaluations.
class FeBudget {
public:
    explicit FeBudget(std::size_t max) : max_(max) {}

    std::size_t used() const { return used_; }
    std::size_t max() const { return max_; }
    std::size_t remaining() const { return max_ - used_; }
    bool exhausted() const { return used_ >= max_; }

    /// Consumes one evaluation; false when none is left.
    bool try_charge() {
        if (used_ >= max_) {
            return false;
        }
        ++used_;
        return true;
    }

private:
    std::size_t used_ = 0;
    std::size_t max_;
};

/// The context vector x* and its real fitness.
struct ContextState {
    Vector x;
    double f = 0.0;
    std::uint64_t version = 0;
};

struct TraceRow {
    std::size_t generation = 0;
    long subproblem = -1;  // -1 for the initialization row
    std::size_t fes = 0;
    double f = 0.0;
};

struct RunRecord {
    std::vector<TraceRow> trace;
    Vector best_x;
    double best_f = 0.0;
    std::size_t fes_used = 0;
    std::size_t generations = 0;
};

struct SaccParams {
    std::size_t population = 100;  // p
    std::size_t reevaluations = 10;  // q
    double archive_factor = 5.0;   // d = archive_factor * s
    ShadeSettings shade;
    /// Re-evaluate x* (uncharged) after every context update and record the
    /// discrepancy with the algebraically maintained f(x*).
    bool audit = false;
};

/// Training archive size for a sub-problem of dimension s.
std::size_t archive_capacity(const SaccParams& params, std::size_t s);

/// Per-sub-problem optimizer state.
struct SubproblemState {
    TrainingArchive archive;
    SubPopulation population;
    ParameterMemory memory;
    InferiorArchive inferior;
    Rng rng;
};

struct GenerationReport {
    std::size_t generation = 0;  // 1-based count of optimization generations
    std::size_t subproblem = 0;
    std::size_t fes_before = 0;
    std::size_t fes_after = 0;
    std::size_t trials = 0;
    std::size_t real_evaluations = 0;
    std::size_t successes = 0;
    bool context_updated = false;
    double delta = 0.0;
    bool truncated = false;
    bool model_regularized = false;
    bool model_failed = false;
    std::optional<double> audit_relative_error;
    TrialBatch batch;
    SelectionOutcome selection;
};

/// RBF-assisted cooperative coevolution: one tSHADE generation per selected
/// sub-problem, round robin, with q real evaluations per generation.
class SaccOptimizer {
public:
    /// Initializes x*, and for every sub-problem draws max(d, p) real-evaluated
    /// samples (D_g gets the newest d, P_g the best p), p unevaluated A_g
    /// members and a fresh parameter memory.
    SaccOptimizer(const Objective& objective, Decomposition decomposition, SaccParams params, std::uint64_t seed,
                  std::size_t max_fes);

    /// 1 + sum_g max(d_g, p).
    static std::size_t initialization_cost(const Decomposition& decomposition, const SaccParams& params);

    /// f(x*) - f(x* | x_g); charges one FE. nullopt when the budget is spent.
    std::optional<double> real_improvement(std::size_t g, std::span<const double> x_g);

    /// Same value without touching the budget (audits and tests).
    double audit_improvement(std::size_t g, std::span<const double> x_g) const;

    GenerationReport step();
    /// step() with the RBF model replaced by `surrogate`.
    GenerationReport step_with(const Predictor& surrogate);

    RunRecord run();

    const ContextState& context() const { return context_; }
    const FeBudget& budget() const { return budget_; }
    const Decomposition& decomposition() const { return decomposition_; }
    const SubproblemState& subproblem(std::size_t g) const { return states_[g]; }
    const SaccParams& params() const { return params_; }
    std::size_t cursor() const { return cursor_; }
    std::size_t generations() const { return generation_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    /// A generation is only started when its q reevaluations fit in the
    /// remaining budget, so every generation costs exactly q FEs.
    bool finished() const { return finished_ || budget_.remaining() < params_.reevaluations; }

private:
    GenerationReport generation(std::size_t g, const Predictor* surrogate);

    const Objective& objective_;
    Decomposition decomposition_;
    SaccParams params_;
    FeBudget budget_;
    ContextState context_;
    std::vector<SubproblemState> states_;
    Rng coordinator_rng_;
    std::size_t cursor_ = 0;
    std::size_t generation_ = 0;
    bool finished_ = false;
    std::vector<TraceRow> trace_;
    mutable Vector scratch_;
};

}  // namespace sacc
