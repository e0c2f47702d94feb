#pragma once

#include "sacc/types.hpp"

#include <cstddef>
#include <vector>

namespace sacc {

/// A sub-solution with its real fitness improvement over the current context.
struct Individual {
    Vector x;
    double improvement = 0.0;
};

/// The p real-evaluated individuals of one sub-problem. Larger improvement
/// is better.
class SubPopulation {
public:
    static constexpr std::size_t min_size = 4;

    SubPopulation() = default;
    explicit SubPopulation(std::vector<Individual> members);

    std::size_t size() const { return members_.size(); }
    const Individual& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<Individual>& members() const { return members_; }

    /// Smallest improvement; ties go to the lowest index.
    std::size_t worst_index() const;
    /// Largest improvement; ties go to the lowest index.
    std::size_t best_index() const;
    /// Indices ordered best first (stable on ties).
    std::vector<std::size_t> ranking() const;

    void replace(std::size_t i, Individual individual);
    void set_improvement(std::size_t i, double improvement) { members_[i].improvement = improvement; }

    /// Subtracts delta from every stored improvement.
    void shift_improvements(double delta);

private:
    std::vector<Individual> members_;
};

}  // namespace sacc
