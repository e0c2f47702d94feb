#include "sacc/benchmark_suite.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sacc {

std::string_view to_string(BaseFunction base) {
    switch (base) {
        case BaseFunction::elliptic: return "elliptic";
        case BaseFunction::rastrigin: return "rastrigin";
        case BaseFunction::ackley: return "ackley";
        case BaseFunction::schwefel: return "schwefel-1.2";
        case BaseFunction::rosenbrock: return "rosenbrock";
        case BaseFunction::sphere: return "sphere";
    }
    return "unknown";
}

std::string_view to_string(GroupKind kind) {
    return kind == GroupKind::separable_block ? "separable-block" : "nonseparable-rotated";
}

Bounds default_bounds(BaseFunction base) {
    switch (base) {
        case BaseFunction::rastrigin: return {-5.0, 5.0};
        case BaseFunction::ackley: return {-32.0, 32.0};
        default: return {-100.0, 100.0};
    }
}

void SeparabilityStructure::validate() const {
    if (groups.empty()) {
        throw ContractViolation("separability structure has no groups");
    }
    std::vector<char> seen(n, 0);
    std::size_t covered = 0;
    for (const auto& group : groups) {
        if (group.indices.empty()) {
            throw ContractViolation("separability structure contains an empty group");
        }
        for (std::size_t idx : group.indices) {
            if (idx >= n) {
                throw ContractViolation("group index out of range");
            }
            if (seen[idx]) {
                throw ContractViolation("groups overlap at index " + std::to_string(idx));
            }
            seen[idx] = 1;
            ++covered;
        }
    }
    if (covered != n) {
        throw ContractViolation("groups do not cover every variable");
    }
}

namespace base {

double elliptic(std::span<const double> z) {
    const std::size_t m = z.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double exponent = m > 1 ? 6.0 * static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
        sum += std::pow(10.0, exponent) * z[i] * z[i];
    }
    return sum;
}

double rastrigin(std::span<const double> z) {
    double sum = 0.0;
    for (double v : z) {
        sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
    }
    return sum;
}

double ackley(std::span<const double> z) {
    if (z.empty()) {
        return 0.0;
    }
    const double m = static_cast<double>(z.size());
    double squares = 0.0;
    double cosines = 0.0;
    for (double v : z) {
        squares += v * v;
        cosines += std::cos(2.0 * std::numbers::pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(squares / m)) - std::exp(cosines / m) + 20.0 + std::numbers::e;
}

double schwefel_1_2(std::span<const double> z) {
    double sum = 0.0;
    double prefix = 0.0;
    for (double v : z) {
        prefix += v;
        sum += prefix * prefix;
    }
    return sum;
}

double rosenbrock(std::span<const double> z) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i] + 1.0;
        const double b = z[i + 1] + 1.0;
        sum += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    return sum;
}

double sphere(std::span<const double> z) {
    double sum = 0.0;
    for (double v : z) {
        sum += v * v;
    }
    return sum;
}

}  // namespace base

double evaluate_base(BaseFunction fn, GroupKind kind, std::span<const double> z) {
    switch (fn) {
        case BaseFunction::elliptic: return base::elliptic(z);
        case BaseFunction::rastrigin: return base::rastrigin(z);
        case BaseFunction::sphere: return base::sphere(z);
        case BaseFunction::schwefel: return base::schwefel_1_2(z);
        case BaseFunction::rosenbrock: return base::rosenbrock(z);
        case BaseFunction::ackley:
            if (kind == GroupKind::nonseparable_rotated) {
                return base::ackley(z);
            }
            {
                double sum = 0.0;
                for (std::size_t i = 0; i < z.size(); ++i) {
                    sum += base::ackley(z.subspan(i, 1));
                }
                return sum;
            }
    }
    return 0.0;
}

BenchmarkFunction::BenchmarkFunction(std::string id, std::string label, std::vector<Bounds> bounds,
                                     Vector shift, std::vector<SquareMatrix> rotations,
                                     SeparabilityStructure structure, std::uint64_t seed)
    : id_(std::move(id)),
      label_(std::move(label)),
      bounds_(std::move(bounds)),
      shift_(std::move(shift)),
      rotations_(std::move(rotations)),
      structure_(std::move(structure)),
      seed_(seed) {
    structure_.validate();
    if (bounds_.size() != structure_.n || shift_.size() != structure_.n) {
        throw ContractViolation("bounds/shift length does not match dimension");
    }
    rotation_index_.assign(structure_.groups.size(), npos);
    std::size_t next_rotation = 0;
    for (std::size_t g = 0; g < structure_.groups.size(); ++g) {
        const auto& group = structure_.groups[g];
        if (group.kind == GroupKind::separable_block) {
            if (group.base == BaseFunction::schwefel || group.base == BaseFunction::rosenbrock) {
                throw ContractViolation("schwefel/rosenbrock bases are not additive per variable");
            }
            continue;
        }
        if (next_rotation >= rotations_.size() || rotations_[next_rotation].size != group.indices.size()) {
            throw ContractViolation("missing or mis-sized rotation for nonseparable group");
        }
        rotation_index_[g] = next_rotation++;
    }
    if (next_rotation != rotations_.size()) {
        throw ContractViolation("more rotations than nonseparable groups");
    }
}

double BenchmarkFunction::group_value(std::span<const double> x, std::size_t g,
                                      std::vector<double>& scratch) const {
    const auto& group = structure_.groups[g];
    const std::size_t m = group.indices.size();
    scratch.resize(2 * m);
    double* shifted = scratch.data();
    double* z = scratch.data() + m;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t idx = group.indices[i];
        shifted[i] = x[idx] - shift_[idx];
    }
    if (rotation_index_[g] == npos) {
        std::copy(shifted, shifted + m, z);
    } else {
        const SquareMatrix& rot = rotations_[rotation_index_[g]];
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            const double* row = rot.data.data() + r * m;
            for (std::size_t c = 0; c < m; ++c) {
                acc += row[c] * shifted[c];
            }
            z[r] = acc;
        }
    }
    return group.weight * evaluate_base(group.base, group.kind, std::span<const double>(z, m));
}

double BenchmarkFunction::evaluate(std::span<const double> x) const {
    if (x.size() != structure_.n) {
        throw ContractViolation("evaluate: expected dimension " + std::to_string(structure_.n) +
                                ", got " + std::to_string(x.size()));
    }
    std::vector<double> scratch;
    double total = 0.0;
    for (std::size_t g = 0; g < structure_.groups.size(); ++g) {
        total += group_value(x, g, scratch);
    }
    return total;
}

double BenchmarkFunction::partial_fitness(std::span<const double> x, std::size_t g) const {
    if (x.size() != structure_.n) {
        throw ContractViolation("partial_fitness: dimension mismatch");
    }
    if (g >= structure_.groups.size()) {
        throw ContractViolation("partial_fitness: invalid group index " + std::to_string(g));
    }
    std::vector<double> scratch;
    return group_value(x, g, scratch);
}

std::size_t nonseparable_group_size(std::size_t dim) { return dim / 20; }

SquareMatrix random_rotation(std::size_t size, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(size, size);
    for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
            a(r, c) = gauss(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(size, size);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    // Fix column signs so the draw does not depend on the QR sign convention.
    for (std::size_t c = 0; c < size; ++c) {
        if (packed(c, c) < 0.0) {
            q.col(c) *= -1.0;
        }
    }
    SquareMatrix out{size, std::vector<double>(size * size)};
    for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
            out.data[r * size + c] = q(r, c);
        }
    }
    return out;
}

namespace {

struct Layout {
    BaseFunction separable;
    BaseFunction nonseparable;
    std::size_t nonseparable_groups;  // 0, 1, half-dim or full-dim count
    double nonseparable_weight;
    bool has_separable;
    const char* label;
};

Layout layout_for(int number) {
    using B = BaseFunction;
    switch (number) {
        case 1: return {B::elliptic, B::elliptic, 0, 1.0, true, "separable elliptic"};
        case 2: return {B::rastrigin, B::rastrigin, 0, 1.0, true, "separable rastrigin"};
        case 3: return {B::ackley, B::ackley, 0, 1.0, true, "separable ackley"};
        case 4: return {B::elliptic, B::elliptic, 1, 1e6, true, "single-group rotated elliptic"};
        case 5: return {B::rastrigin, B::rastrigin, 1, 1e6, true, "single-group rotated rastrigin"};
        case 6: return {B::ackley, B::ackley, 1, 1e6, true, "single-group rotated ackley"};
        case 7: return {B::sphere, B::schwefel, 1, 1e6, true, "single-group schwefel-1.2"};
        case 8: return {B::sphere, B::rosenbrock, 1, 1e6, true, "single-group rosenbrock"};
        case 9: return {B::elliptic, B::elliptic, 10, 1.0, true, "ten-group rotated elliptic"};
        case 10: return {B::rastrigin, B::rastrigin, 10, 1.0, true, "ten-group rotated rastrigin"};
        case 11: return {B::ackley, B::ackley, 10, 1.0, true, "ten-group rotated ackley"};
        case 12: return {B::sphere, B::schwefel, 10, 1.0, true, "ten-group schwefel-1.2"};
        case 13: return {B::sphere, B::rosenbrock, 10, 1.0, true, "ten-group rosenbrock"};
        case 14: return {B::elliptic, B::elliptic, 20, 1.0, false, "twenty-group rotated elliptic"};
        case 15: return {B::rastrigin, B::rastrigin, 20, 1.0, false, "twenty-group rotated rastrigin"};
        case 16: return {B::ackley, B::ackley, 20, 1.0, false, "twenty-group rotated ackley"};
        case 17: return {B::sphere, B::schwefel, 20, 1.0, false, "twenty-group schwefel-1.2"};
        case 18: return {B::sphere, B::rosenbrock, 20, 1.0, false, "twenty-group rosenbrock"};
        default: break;
    }
    throw ContractViolation("function number must be in 1..18, got " + std::to_string(number));
}

}  // namespace

BenchmarkFunction make_function(int number, std::size_t dim, std::uint64_t seed) {
    const Layout layout = layout_for(number);
    const std::size_t m = nonseparable_group_size(dim);
    if (dim % 20 != 0 || m < 2) {
        throw ContractViolation("dimension " + std::to_string(dim) +
                                " cannot hold the suite's group structure (need a multiple of 20, >= 40)");
    }
    const std::size_t nonsep_vars = layout.nonseparable_groups * m;
    if (nonsep_vars > dim || (!layout.has_separable && nonsep_vars != dim)) {
        throw ContractViolation("group structure does not fit the dimension");
    }

    const std::uint64_t fn_seed = derive_seed(seed, static_cast<std::uint64_t>(number));
    Rng rng(fn_seed);

    const Bounds box = default_bounds(layout.nonseparable_groups > 0 ? layout.nonseparable : layout.separable);
    std::vector<Bounds> bounds(dim, box);

    Vector shift(dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < dim; ++j) {
        shift[j] = box.lower + box.width() * (0.1 + 0.8 * unit(rng));
    }

    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (layout.nonseparable_groups > 0) {
        std::shuffle(perm.begin(), perm.end(), rng);
    }

    SeparabilityStructure structure;
    structure.n = dim;
    std::vector<SquareMatrix> rotations;
    for (std::size_t k = 0; k < layout.nonseparable_groups; ++k) {
        VariableGroup group;
        group.indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(k * m),
                             perm.begin() + static_cast<std::ptrdiff_t>((k + 1) * m));
        std::sort(group.indices.begin(), group.indices.end());
        group.kind = GroupKind::nonseparable_rotated;
        group.base = layout.nonseparable;
        group.weight = layout.nonseparable_weight;
        structure.groups.push_back(std::move(group));
        rotations.push_back(random_rotation(m, rng));
    }
    if (nonsep_vars < dim) {
        VariableGroup group;
        group.indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(nonsep_vars), perm.end());
        std::sort(group.indices.begin(), group.indices.end());
        group.kind = GroupKind::separable_block;
        group.base = layout.separable;
        structure.groups.push_back(std::move(group));
    }

    return BenchmarkFunction("F" + std::to_string(number), layout.label, std::move(bounds), std::move(shift),
                             std::move(rotations), std::move(structure), seed);
}

std::vector<BenchmarkFunction> make_suite(std::size_t dim, std::uint64_t seed) {
    std::vector<BenchmarkFunction> suite;
    suite.reserve(18);
    for (int number = 1; number <= 18; ++number) {
        suite.push_back(make_function(number, dim, seed));
    }
    return suite;
}

int parse_function_id(std::string_view id) {
    if (!id.empty() && (id.front() == 'F' || id.front() == 'f')) {
        id.remove_prefix(1);
    }
    int number = 0;
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), number);
    if (ec != std::errc() || ptr != id.data() + id.size() || number < 1 || number > 18) {
        throw ContractViolation("unknown benchmark function id '" + std::string(id) + "'");
    }
    return number;
}

namespace {

nlohmann::json function_json(const BenchmarkFunction& fn) {
    nlohmann::json groups = nlohmann::json::array();
    std::size_t separable = 0;
    std::vector<std::size_t> nonseparable_sizes;
    for (const auto& group : fn.structure().groups) {
        groups.push_back({{"kind", to_string(group.kind)},
                          {"base", to_string(group.base)},
                          {"size", group.indices.size()},
                          {"weight", group.weight}});
        if (group.kind == GroupKind::separable_block) {
            separable += group.indices.size();
        } else {
            nonseparable_sizes.push_back(group.indices.size());
        }
    }
    const Bounds box = fn.bounds().front();
    return {{"id", fn.id()},
            {"label", fn.label()},
            {"dimension", fn.dimension()},
            {"bounds", {box.lower, box.upper}},
            {"separable_variables", separable},
            {"nonseparable_group_sizes", nonseparable_sizes},
            {"groups", groups},
            {"seed", fn.seed()}};
}

}  // namespace

std::string function_manifest_json(const BenchmarkFunction& fn) { return function_json(fn).dump(2); }

std::string suite_manifest_json(const std::vector<BenchmarkFunction>& suite, std::size_t dim,
                                std::uint64_t seed) {
    nlohmann::json functions = nlohmann::json::array();
    for (const auto& fn : suite) {
        functions.push_back(function_json(fn));
    }
    nlohmann::json doc = {
        {"dimension", dim},
        {"seed", seed},
        {"nonseparable_group_size", nonseparable_group_size(dim)},
        {"scaling_rule", "nonseparable group size = dimension / 20 (50 at dimension 1000); group counts fixed"},
        {"shift_rule", "uniform in the middle 80% of the box"},
        {"rotation_rule", "QR of a seeded Gaussian matrix, one per nonseparable group"},
        {"functions", functions}};
    return doc.dump(2);
}

}  // namespace sacc
