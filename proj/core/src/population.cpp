#include "sacc/population.hpp"

#include <algorithm>
#include <numeric>

namespace sacc {

SubPopulation::SubPopulation(std::vector<Individual> members) : members_(std::move(members)) {
    if (members_.size() < min_size) {
        throw ContractViolation("sub-population needs at least " + std::to_string(min_size) + " members");
    }
    const std::size_t dim = members_.front().x.size();
    for (const auto& m : members_) {
        if (m.x.size() != dim || dim == 0) {
            throw ContractViolation("sub-population members must share a non-zero dimension");
        }
    }
}

std::size_t SubPopulation::worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
        if (members_[i].improvement < members_[worst].improvement) {
            worst = i;
        }
    }
    return worst;
}

std::size_t SubPopulation::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
        if (members_[i].improvement > members_[best].improvement) {
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> SubPopulation::ranking() const {
    std::vector<std::size_t> order(members_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        return members_[a].improvement > members_[b].improvement;
    });
    return order;
}

void SubPopulation::replace(std::size_t i, Individual individual) {
    if (i >= members_.size()) {
        throw ContractViolation("replace: member index out of range");
    }
    if (individual.x.size() != members_[i].x.size()) {
        throw ContractViolation("replace: dimension mismatch");
    }
    members_[i] = std::move(individual);
}

void SubPopulation::shift_improvements(double delta) {
    for (auto& m : members_) {
        m.improvement -= delta;
    }
}

}  // namespace sacc
