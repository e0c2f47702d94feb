#pragma once

#include "sacc/benchmark_suite.hpp"
#include "sacc/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sacc {

struct SubProblem {
    std::size_t id = 0;
    std::vector<std::size_t> indices;
    std::vector<Bounds> bounds;

    std::size_t dim() const { return indices.size(); }
};

/// A partition of the variable indices {0..n-1} into sub-problems.
class Decomposition {
public:
    /// Throws ContractViolation unless the sub-problems are disjoint and exhaustive.
    Decomposition(std::size_t n, std::vector<SubProblem> subproblems);

    std::size_t n() const { return n_; }
    std::size_t size() const { return subproblems_.size(); }
    const SubProblem& operator[](std::size_t g) const { return subproblems_[g]; }
    const std::vector<SubProblem>& subproblems() const { return subproblems_; }

    std::string to_json() const;

private:
    std::size_t n_;
    std::vector<SubProblem> subproblems_;
};

/// Nonseparable groups become one sub-problem each; separable variables are
/// chunked in ascending index order into blocks of `separable_size` (the last
/// block may be smaller). Sub-problems follow the structure's group order.
Decomposition ideal_decompose(const SeparabilityStructure& structure, std::span<const Bounds> bounds,
                              std::size_t separable_size);

/// Convenience: sub-problems of `size` consecutive indices over a box.
Decomposition block_decompose(std::span<const Bounds> bounds, std::size_t size);

/// Copy of `context` with sub.indices overwritten by x_g.
Vector embed(std::span<const double> context, const SubProblem& sub, std::span<const double> x_g);

/// In-place variant used on hot paths.
void embed_into(std::span<double> target, const SubProblem& sub, std::span<const double> x_g);

Vector extract(std::span<const double> x, const SubProblem& sub);

}  // namespace sacc
