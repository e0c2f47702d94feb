#pragma once

#include "sacc/decomposition.hpp"
#include "sacc/sacc.hpp"
#include "sacc/tshade.hpp"

#include <cstddef>
#include <cstdint>

namespace sacc {

struct ShadeCcParams {
    std::size_t population = 100;    // p
    std::size_t visit_length = 100;  // L, SHADE generations per visit
    ShadeSettings shade;
    /// Charge the p evaluations spent reevaluating a population when its
    /// sub-problem is selected.
    bool charge_reevaluation = true;
};

/// Traditional cooperative coevolution with SHADE (SHADE-CC): round robin
/// over sub-problems, L generations per visit, every trial evaluated
/// against the context vector.
class ShadeCcOptimizer {
public:
    ShadeCcOptimizer(const Objective& objective, Decomposition decomposition, ShadeCcParams params,
                     std::uint64_t seed, std::size_t max_fes);

    /// Runs one visit of the current sub-problem. Returns the number of
    /// completed generations.
    std::size_t visit();

    RunRecord run();

    const ContextState& context() const { return context_; }
    const FeBudget& budget() const { return budget_; }
    std::size_t generations() const { return generation_; }
    std::size_t visits() const { return visits_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    bool finished() const { return finished_ || budget_.exhausted(); }

private:
    struct State {
        SubPopulation population;
        ParameterMemory memory;
        InferiorArchive inferior;
        Rng rng;
    };

    std::optional<double> evaluate_subsolution(std::size_t g, std::span<const double> x_g, double reference,
                                               bool charge);

    const Objective& objective_;
    Decomposition decomposition_;
    ShadeCcParams params_;
    FeBudget budget_;
    ContextState context_;
    std::vector<State> states_;
    Rng coordinator_rng_;
    std::size_t cursor_ = 0;
    std::size_t generation_ = 0;
    std::size_t visits_ = 0;
    bool finished_ = false;
    std::vector<TraceRow> trace_;
    Vector scratch_;
};

RunRecord run_cc(const Objective& objective, Decomposition decomposition, const ShadeCcParams& params,
                 std::uint64_t seed, std::size_t max_fes);

}  // namespace sacc
