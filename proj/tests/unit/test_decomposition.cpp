#include "sacc/decomposition.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace sacc;

namespace {
void expect_partition(const Decomposition& dec) {
    std::vector<int> count(dec.n(), 0);
    for (const auto& sub : dec.subproblems()) {
        for (std::size_t idx : sub.indices) {
            ++count[idx];
        }
    }
    EXPECT_TRUE(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
}
}  // namespace

TEST(IdealDecompose, FullySeparableChunksOfTwenty) {
    const auto fn = make_function(1, 1000, 1);
    const auto dec = ideal_decompose(fn.structure(), fn.bounds(), 20);
    ASSERT_EQ(dec.size(), 50u);
    for (const auto& sub : dec.subproblems()) {
        EXPECT_EQ(sub.dim(), 20u);
        EXPECT_TRUE(std::is_sorted(sub.indices.begin(), sub.indices.end()));
    }
    expect_partition(dec);
}

TEST(IdealDecompose, TenGroupFunctionWithChunksOfHundred) {
    const auto fn = make_function(10, 1000, 1);
    const auto dec = ideal_decompose(fn.structure(), fn.bounds(), 100);
    ASSERT_EQ(dec.size(), 15u);
    std::size_t fifty = 0, hundred = 0;
    for (const auto& sub : dec.subproblems()) {
        fifty += sub.dim() == 50;
        hundred += sub.dim() == 100;
    }
    EXPECT_EQ(fifty, 10u);
    EXPECT_EQ(hundred, 5u);
    expect_partition(dec);
}

TEST(IdealDecompose, NonseparableGroupsKeptVerbatim) {
    const auto fn = make_function(14, 200, 1);
    const auto dec = ideal_decompose(fn.structure(), fn.bounds(), 7);
    ASSERT_EQ(dec.size(), fn.structure().groups.size());
    for (std::size_t g = 0; g < dec.size(); ++g) {
        EXPECT_EQ(dec[g].indices, fn.structure().groups[g].indices);
    }
}

TEST(IdealDecompose, SingleChunkWhenSizeCoversEverything) {
    SeparabilityStructure structure;
    structure.n = 10;
    VariableGroup group;
    for (std::size_t i = 0; i < 10; ++i) group.indices.push_back(i);
    structure.groups.push_back(group);
    const std::vector<Bounds> bounds(10, Bounds{-1, 1});
    const auto dec = ideal_decompose(structure, bounds, 10);
    ASSERT_EQ(dec.size(), 1u);
    EXPECT_EQ(dec[0].indices, group.indices);
}

TEST(IdealDecompose, TrailingChunkMayBeSmaller) {
    const auto fn = make_function(1, 100, 1);
    const auto dec = ideal_decompose(fn.structure(), fn.bounds(), 30);
    ASSERT_EQ(dec.size(), 4u);
    EXPECT_EQ(dec[3].dim(), 10u);
}

TEST(IdealDecompose, RejectsEmptyStructureAndZeroSize) {
    SeparabilityStructure empty;
    empty.n = 0;
    EXPECT_THROW(ideal_decompose(empty, {}, 10), ContractViolation);
    const auto fn = make_function(1, 100, 1);
    EXPECT_THROW(ideal_decompose(fn.structure(), fn.bounds(), 0), ContractViolation);
}

TEST(Decomposition, RejectsOverlapAndGaps) {
    const std::vector<Bounds> b2(2, Bounds{0, 1});
    std::vector<SubProblem> overlap{{0, {0, 1}, b2}, {1, {1, 2}, b2}};
    EXPECT_THROW(Decomposition(3, overlap), ContractViolation);
    std::vector<SubProblem> gap{{0, {0, 1}, b2}};
    EXPECT_THROW(Decomposition(3, gap), ContractViolation);
}

TEST(Embed, OverwritesOnlyTheSubProblemIndices) {
    SubProblem sub{0, {1, 3}, {Bounds{0, 1}, Bounds{0, 1}}};
    const std::vector<double> context{10, 20, 30, 40};
    const std::vector<double> x_g{7, 8};
    const auto out = embed(context, sub, x_g);
    EXPECT_EQ(out, (std::vector<double>{10, 7, 30, 8}));
    EXPECT_EQ(context, (std::vector<double>{10, 20, 30, 40}));
    EXPECT_EQ(embed(context, sub, extract(context, sub)), context);
    EXPECT_THROW(embed(context, sub, std::vector<double>{1}), ContractViolation);
}

TEST(Embed, RoundTripOverRandomIndexSets) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> perm(30);
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::size_t s = 1 + rng() % 30;
        SubProblem sub{0, {perm.begin(), perm.begin() + static_cast<long>(s)}, std::vector<Bounds>(s, {0, 1})};
        std::vector<double> context(30), x_g(s);
        std::uniform_real_distribution<double> u(-5, 5);
        for (auto& v : context) v = u(rng);
        for (auto& v : x_g) v = u(rng);
        EXPECT_EQ(extract(embed(context, sub, x_g), sub), x_g);
    }
}

TEST(Embed, SeparableImprovementDependsOnlyOnOwnComponents) {
    const auto fn = make_function(2, 100, 1);
    const auto dec = ideal_decompose(fn.structure(), fn.bounds(), 20);
    std::mt19937_64 rng(1);
    auto point = [&] {
        std::vector<double> x(100);
        std::uniform_real_distribution<double> u(-5, 5);
        for (auto& v : x) v = u(rng);
        return x;
    };
    const auto c = point();
    const auto x_g = extract(point(), dec[2]);
    const double reference = fn.evaluate(embed(c, dec[2], x_g)) - fn.evaluate(c);
    for (int trial = 0; trial < 10; ++trial) {
        auto other = point();
        for (std::size_t idx : dec[2].indices) other[idx] = c[idx];
        const double diff = fn.evaluate(embed(other, dec[2], x_g)) - fn.evaluate(other);
        EXPECT_NEAR(diff, reference, 1e-9 * std::max(1.0, std::abs(fn.evaluate(c))));
    }
}
