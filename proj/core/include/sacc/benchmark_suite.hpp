#pragma once

#include "sacc/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sacc {

enum class BaseFunction { elliptic, rastrigin, ackley, schwefel, rosenbrock, sphere };

enum class GroupKind {
    separable_block,      // additive over its variables, no rotation
    nonseparable_rotated  // whole group rotated, base applied jointly
};

std::string_view to_string(BaseFunction base);
std::string_view to_string(GroupKind kind);

/// Conventional search box for each base function.
Bounds default_bounds(BaseFunction base);

/// Dense row-major square matrix. Only used for rotations.
struct SquareMatrix {
    std::size_t size = 0;
    std::vector<double> data;

    double operator()(std::size_t row, std::size_t col) const { return data[row * size + col]; }
};

struct VariableGroup {
    std::vector<std::size_t> indices;  // ascending, 0-based
    GroupKind kind = GroupKind::separable_block;
    BaseFunction base = BaseFunction::sphere;
    double weight = 1.0;
};

struct SeparabilityStructure {
    std::size_t n = 0;
    std::vector<VariableGroup> groups;

    /// Throws ContractViolation unless the groups partition {0..n-1}.
    void validate() const;
};

/// Base function values on already transformed coordinates.
namespace base {
double elliptic(std::span<const double> z);
double rastrigin(std::span<const double> z);
double ackley(std::span<const double> z);
double schwefel_1_2(std::span<const double> z);
double rosenbrock(std::span<const double> z);  // optimum at z = 0 (the +1 offset is internal)
double sphere(std::span<const double> z);
}  // namespace base

/// Evaluates `base` over `z`, additively per variable when the group is a
/// separable block (Ackley then becomes a sum of one-dimensional Ackley terms).
double evaluate_base(BaseFunction base, GroupKind kind, std::span<const double> z);

/// A shifted, optionally rotated, partially additively separable test
/// function: f(x) = sum_g w_g * base_g(T_g(x_g - o_g)). Immutable.
class BenchmarkFunction final : public Objective {
public:
    BenchmarkFunction(std::string id, std::string label, std::vector<Bounds> bounds, Vector shift,
                      std::vector<SquareMatrix> rotations, SeparabilityStructure structure,
                      std::uint64_t seed);

    std::size_t dimension() const override { return structure_.n; }
    std::span<const Bounds> bounds() const override { return bounds_; }
    double evaluate(std::span<const double> x) const override;

    /// Contribution of group `g` alone.
    double partial_fitness(std::span<const double> x, std::size_t g) const;

    const std::string& id() const { return id_; }
    const std::string& label() const { return label_; }
    const Vector& shift() const { return shift_; }
    const SeparabilityStructure& structure() const { return structure_; }
    /// rotations()[rotation_of(g)] is group g's rotation; npos for separable groups.
    const std::vector<SquareMatrix>& rotations() const { return rotations_; }
    std::size_t rotation_of(std::size_t g) const { return rotation_index_[g]; }
    std::uint64_t seed() const { return seed_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    double group_value(std::span<const double> x, std::size_t g, std::vector<double>& scratch) const;

    std::string id_;
    std::string label_;
    std::vector<Bounds> bounds_;
    Vector shift_;
    std::vector<SquareMatrix> rotations_;
    std::vector<std::size_t> rotation_index_;
    SeparabilityStructure structure_;
    std::uint64_t seed_ = 0;
};

/// Group size for nonseparable blocks at dimension `dim`: 50 at dim 1000,
/// scaled linearly (dim / 20).
std::size_t nonseparable_group_size(std::size_t dim);

/// Builds analog number `number` (1..18) of the CEC-2010 layout at `dim`.
BenchmarkFunction make_function(int number, std::size_t dim, std::uint64_t seed);

/// All 18 analogs, F1..F18. Deterministic per (dim, seed).
std::vector<BenchmarkFunction> make_suite(std::size_t dim, std::uint64_t seed);

/// Parses "F7", "f7" or "7" into 7. Throws ContractViolation otherwise.
int parse_function_id(std::string_view id);

/// Structured-text manifest of one function or a whole suite (JSON).
std::string function_manifest_json(const BenchmarkFunction& fn);
std::string suite_manifest_json(const std::vector<BenchmarkFunction>& suite, std::size_t dim,
                                std::uint64_t seed);

/// QR-orthogonalized Gaussian matrix of the given size.
SquareMatrix random_rotation(std::size_t size, Rng& rng);

}  // namespace sacc
