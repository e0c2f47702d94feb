#include "sacc/rbf.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sacc;

namespace {

std::vector<Bounds> unit_box(std::size_t s) { return std::vector<Bounds>(s, Bounds{0.0, 1.0}); }

TrainingArchive random_archive(std::size_t s, std::size_t d, std::mt19937_64& rng,
                               double (*label)(const std::vector<double>&), std::vector<Bounds> box) {
    TrainingArchive archive(d, box);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> x(s);
        for (std::size_t j = 0; j < s; ++j) {
            std::uniform_real_distribution<double> u(box[j].lower, box[j].upper);
            x[j] = u(rng);
        }
        const double e = label(x);
        archive.push(std::move(x), e);
    }
    return archive;
}

double paraboloid(const std::vector<double>& t) { return t[0] * t[0] + t[1] * t[1]; }

}  // namespace

TEST(RbfTrain, LinearTargetInOneDimension) {
    TrainingArchive archive(3, {Bounds{0.0, 2.0}});
    archive.push({0.0}, 0.0);
    archive.push({1.0}, 1.0);
    archive.push({2.0}, 2.0);
    const RbfModel model = train(archive);
    EXPECT_FALSE(model.regularized());
    EXPECT_NEAR(model.predict(std::vector<double>{1.5}), 1.5, 1e-8);
}

TEST(RbfTrain, InterpolatesParaboloidAndSatisfiesBorderedSystem) {
    std::mt19937_64 rng(42);
    const auto archive = random_archive(2, 6, rng, paraboloid, unit_box(2));
    const RbfModel model = train(archive);
    ASSERT_FALSE(model.regularized());
    for (const auto& entry : archive.entries()) {
        EXPECT_NEAR(model.predict(entry.point), entry.improvement, 1e-6 * std::max(1.0, std::abs(entry.improvement)));
    }
    // Residual of the bordered system assembled independently from the model's centers.
    const std::size_t d = 6, s = 2;
    const auto c = model.centers();
    for (std::size_t i = 0; i < d; ++i) {
        double row = model.beta()[0] * c[i * s] + model.beta()[1] * c[i * s + 1] + model.alpha();
        for (std::size_t k = 0; k < d; ++k) {
            const double r = std::hypot(c[i * s] - c[k * s], c[i * s + 1] - c[k * s + 1]);
            row += r * r * r * model.omega()[k];
        }
        EXPECT_NEAR(row, archive.entries()[i].improvement, 1e-9);
    }
    for (std::size_t j = 0; j <= s; ++j) {
        double orth = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            orth += model.omega()[k] * (j < s ? c[k * s + j] : 1.0);
        }
        EXPECT_NEAR(orth, 0.0, 1e-9);
    }
}

TEST(RbfPredict, MatchesStraightLineSummation) {
    std::mt19937_64 rng(7);
    std::vector<Bounds> box{{-5.0, 5.0}, {-100.0, 100.0}, {0.0, 2.0}};
    auto label = [](const std::vector<double>& t) { return std::sin(t[0]) + t[1] * 0.01 - t[2] * t[2]; };
    TrainingArchive archive(15, box);
    for (int i = 0; i < 15; ++i) {
        std::vector<double> x(3);
        for (std::size_t j = 0; j < 3; ++j) x[j] = std::uniform_real_distribution<double>(box[j].lower, box[j].upper)(rng);
        archive.push(x, label(x));
    }
    const RbfModel model = train(archive);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3), u(3);
        for (std::size_t j = 0; j < 3; ++j) {
            x[j] = std::uniform_real_distribution<double>(box[j].lower, box[j].upper)(rng);
            u[j] = (x[j] - box[j].lower) / (box[j].upper - box[j].lower);
        }
        double expected = model.alpha();
        for (std::size_t j = 0; j < 3; ++j) expected += model.beta()[j] * u[j];
        for (std::size_t i = 0; i < model.num_centers(); ++i) {
            double sq = 0.0;
            for (std::size_t j = 0; j < 3; ++j) sq += std::pow(u[j] - model.centers()[i * 3 + j], 2);
            expected += model.omega()[i] * std::pow(std::sqrt(sq), 3);
        }
        EXPECT_NEAR(model.predict(x), expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST(RbfPredict, AffineTargetsReproducedEverywhere) {
    std::mt19937_64 rng(3);
    for (std::size_t s : {2u, 5u, 10u, 20u}) {
        std::vector<Bounds> box(s, Bounds{-100.0, 100.0});
        std::vector<double> beta(s);
        for (auto& b : beta) b = std::uniform_real_distribution<double>(-3, 3)(rng);
        const double alpha = 17.0;
        TrainingArchive archive(5 * s, box);
        auto affine = [&](const std::vector<double>& x) {
            double v = alpha;
            for (std::size_t j = 0; j < s; ++j) v += beta[j] * x[j];
            return v;
        };
        for (std::size_t i = 0; i < 5 * s; ++i) {
            auto x = uniform_point(box, rng);
            archive.push(x, affine(x));
        }
        const RbfModel model = train(archive);
        for (int k = 0; k < 100; ++k) {
            auto x = uniform_point(box, rng);
            EXPECT_NEAR(model.predict(x), affine(x), 1e-8 * std::max(1.0, std::abs(affine(x)))) << "s=" << s;
        }
    }
}

TEST(RbfTrain, DuplicateSamplesTriggerRegularizedFallback) {
    TrainingArchive archive(6, unit_box(2));
    archive.push({0.1, 0.1}, 1.0);
    archive.push({0.9, 0.1}, 2.0);
    archive.push({0.1, 0.9}, 3.0);
    archive.push({0.5, 0.5}, 4.0);
    archive.push_unchecked({0.5, 0.5}, 4.0);
    archive.push({0.7, 0.3}, 5.0);
    const RbfModel model = train(archive);
    EXPECT_TRUE(model.regularized());
    EXPECT_NEAR(model.predict(std::vector<double>{0.5, 0.5}), 4.0, 1e-3);
}

TEST(RbfTrain, TooFewOrDegenerateSamplesFail) {
    TrainingArchive few(2, unit_box(2));
    few.push({0.1, 0.2}, 1.0);
    few.push({0.3, 0.4}, 2.0);
    EXPECT_THROW(train(few), TrainingError);

    TrainingArchive collinear(5, unit_box(2));
    for (int i = 0; i < 5; ++i) {
        collinear.push({0.1 * i, 0.1 * i}, double(i));
    }
    EXPECT_THROW(train(collinear), TrainingError);
}

TEST(RbfPredict, DimensionMismatchThrows) {
    TrainingArchive archive(3, {Bounds{0.0, 2.0}});
    archive.push({0.0}, 0.0);
    archive.push({1.0}, 1.0);
    archive.push({2.0}, 2.0);
    EXPECT_THROW(train(archive).predict(std::vector<double>{1.0, 2.0}), ContractViolation);
}

TEST(TrainingArchive, FifoEvictsOldestTicks) {
    TrainingArchive archive(5, unit_box(1));
    for (int i = 1; i <= 5; ++i) archive.push({0.1 * i}, double(i));
    const std::vector<Sample> batch{{{0.91}, 6.0}, {{0.92}, 7.0}};
    archive.push_real_samples(batch);
    std::vector<std::uint64_t> ticks;
    for (const auto& e : archive.entries()) ticks.push_back(e.tick);
    EXPECT_EQ(ticks, (std::vector<std::uint64_t>{3, 4, 5, 6, 7}));
    EXPECT_EQ(archive.size(), 5u);
}

TEST(TrainingArchive, FullOrOversizedBatchReplacesEverything) {
    TrainingArchive archive(3, unit_box(1));
    for (int i = 0; i < 3; ++i) archive.push({0.1 * i}, double(i));
    const std::vector<Sample> batch{{{0.5}, 1.0}, {{0.6}, 2.0}, {{0.7}, 3.0}};
    archive.push_real_samples(batch);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(archive.entries()[i].point, batch[i].point);
    }
    const std::vector<Sample> too_big{{{0.1}, 0.0}, {{0.2}, 1.0}, {{0.3}, 2.0}, {{0.4}, 3.0}};
    archive.push_real_samples(too_big);
    ASSERT_EQ(archive.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(archive.entries()[i].point, too_big[i + 1].point);
    }
}

TEST(TrainingArchive, DuplicateIsPerturbedByTinyStep) {
    TrainingArchive archive(4, {Bounds{-100.0, 100.0}, Bounds{-5.0, 5.0}});
    archive.push({1.0, 2.0}, 0.0);
    archive.push({1.0, 2.0}, 0.0);
    ASSERT_EQ(archive.size(), 2u);
    const auto& a = archive.entries()[0].point;
    const auto& b = archive.entries()[1].point;
    EXPECT_NEAR(std::abs(b[0] - a[0]), 1e-9 * 200.0, 1e-15);
    EXPECT_EQ(b[1], a[1]);
}

TEST(Rebase, SubtractsDeltaAndPreservesRanking) {
    TrainingArchive archive(3, unit_box(1));
    archive.push({0.1}, 5.0);
    archive.push({0.2}, 3.0);
    archive.push({0.3}, -1.0);
    SubPopulation pop({{{0.1}, 5.0}, {{0.2}, 3.0}, {{0.3}, -1.0}, {{0.4}, 4.0}});
    const auto before = pop.ranking();
    rebase(archive, pop, 3.0);
    EXPECT_EQ(archive.entries()[0].improvement, 2.0);
    EXPECT_EQ(archive.entries()[1].improvement, 0.0);
    EXPECT_EQ(archive.entries()[2].improvement, -4.0);
    EXPECT_EQ(pop[3].improvement, 1.0);
    EXPECT_EQ(pop.ranking(), before);
    EXPECT_THROW(rebase(archive, pop, 0.0), ContractViolation);
    EXPECT_THROW(rebase(archive, pop, -1.0), ContractViolation);
}
