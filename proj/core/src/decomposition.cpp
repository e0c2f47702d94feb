#include "sacc/decomposition.hpp"

#include <json.hpp>

#include <algorithm>

namespace sacc {

Decomposition::Decomposition(std::size_t n, std::vector<SubProblem> subproblems)
    : n_(n), subproblems_(std::move(subproblems)) {
    if (subproblems_.empty()) {
        throw ContractViolation("decomposition has no sub-problems");
    }
    std::vector<char> seen(n_, 0);
    std::size_t covered = 0;
    for (std::size_t g = 0; g < subproblems_.size(); ++g) {
        auto& sub = subproblems_[g];
        sub.id = g;
        if (sub.indices.empty() || sub.indices.size() > n_) {
            throw ContractViolation("sub-problem dimension must be in [1, n]");
        }
        if (sub.bounds.size() != sub.indices.size()) {
            throw ContractViolation("sub-problem bounds do not match its indices");
        }
        for (std::size_t idx : sub.indices) {
            if (idx >= n_ || seen[idx]) {
                throw ContractViolation("sub-problems are not a partition (index " + std::to_string(idx) + ")");
            }
            seen[idx] = 1;
            ++covered;
        }
    }
    if (covered != n_) {
        throw ContractViolation("sub-problems do not cover every variable");
    }
}

std::string Decomposition::to_json() const {
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& sub : subproblems_) {
        subs.push_back({{"id", sub.id}, {"dimension", sub.dim()}, {"indices", sub.indices}});
    }
    return nlohmann::json{{"n", n_}, {"subproblems", subs}}.dump();
}

namespace {
SubProblem make_sub(std::vector<std::size_t> indices, std::span<const Bounds> bounds) {
    SubProblem sub;
    sub.bounds.reserve(indices.size());
    for (std::size_t idx : indices) {
        sub.bounds.push_back(bounds[idx]);
    }
    sub.indices = std::move(indices);
    return sub;
}
}  // namespace

Decomposition ideal_decompose(const SeparabilityStructure& structure, std::span<const Bounds> bounds,
                              std::size_t separable_size) {
    if (structure.groups.empty()) {
        throw ContractViolation("ideal_decompose: empty structure");
    }
    if (separable_size == 0) {
        throw ContractViolation("ideal_decompose: separable sub-problem size must be >= 1");
    }
    if (bounds.size() != structure.n) {
        throw ContractViolation("ideal_decompose: bounds do not match dimension");
    }
    structure.validate();

    std::vector<SubProblem> subs;
    for (const auto& group : structure.groups) {
        if (group.kind == GroupKind::nonseparable_rotated) {
            subs.push_back(make_sub(group.indices, bounds));
            continue;
        }
        std::vector<std::size_t> sorted = group.indices;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t start = 0; start < sorted.size(); start += separable_size) {
            const std::size_t stop = std::min(sorted.size(), start + separable_size);
            subs.push_back(make_sub({sorted.begin() + static_cast<std::ptrdiff_t>(start),
                                     sorted.begin() + static_cast<std::ptrdiff_t>(stop)},
                                    bounds));
        }
    }
    return Decomposition(structure.n, std::move(subs));
}

Decomposition block_decompose(std::span<const Bounds> bounds, std::size_t size) {
    if (size == 0) {
        throw ContractViolation("block_decompose: size must be >= 1");
    }
    std::vector<SubProblem> subs;
    for (std::size_t start = 0; start < bounds.size(); start += size) {
        std::vector<std::size_t> indices;
        for (std::size_t j = start; j < std::min(bounds.size(), start + size); ++j) {
            indices.push_back(j);
        }
        subs.push_back(make_sub(std::move(indices), bounds));
    }
    return Decomposition(bounds.size(), std::move(subs));
}

void embed_into(std::span<double> target, const SubProblem& sub, std::span<const double> x_g) {
    if (x_g.size() != sub.dim()) {
        throw ContractViolation("embed: sub-solution has length " + std::to_string(x_g.size()) +
                                ", sub-problem has dimension " + std::to_string(sub.dim()));
    }
    for (std::size_t i = 0; i < x_g.size(); ++i) {
        if (sub.indices[i] >= target.size()) {
            throw ContractViolation("embed: sub-problem index outside the context vector");
        }
        target[sub.indices[i]] = x_g[i];
    }
}

Vector embed(std::span<const double> context, const SubProblem& sub, std::span<const double> x_g) {
    Vector out(context.begin(), context.end());
    embed_into(out, sub, x_g);
    return out;
}

Vector extract(std::span<const double> x, const SubProblem& sub) {
    Vector out(sub.dim());
    for (std::size_t i = 0; i < sub.dim(); ++i) {
        if (sub.indices[i] >= x.size()) {
            throw ContractViolation("extract: sub-problem index outside the vector");
        }
        out[i] = x[sub.indices[i]];
    }
    return out;
}

}  // namespace sacc
