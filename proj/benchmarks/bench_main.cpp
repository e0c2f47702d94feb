#include "sacc/benchmark_suite.hpp"
#include "sacc/decomposition.hpp"
#include "sacc/rbf.hpp"
#include "sacc/sacc.hpp"
#include "sacc/tshade.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace sacc;

namespace {

std::vector<Bounds> box(std::size_t s) { return std::vector<Bounds>(s, Bounds{-100.0, 100.0}); }

void BM_RbfTrain(benchmark::State& state) {
    const auto s = static_cast<std::size_t>(state.range(0));
    const auto bounds = box(s);
    Rng rng(1);
    std::vector<Vector> points;
    std::vector<double> labels;
    for (std::size_t i = 0; i < 5 * s; ++i) {
        points.push_back(uniform_point(bounds, rng));
        labels.push_back(static_cast<double>(i % 7));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(points, labels, bounds));
    }
}
BENCHMARK(BM_RbfTrain)->Arg(5)->Arg(20)->Arg(100);

void BM_RbfPredict(benchmark::State& state) {
    const auto s = static_cast<std::size_t>(state.range(0));
    const auto bounds = box(s);
    Rng rng(2);
    std::vector<Vector> points;
    std::vector<double> labels;
    for (std::size_t i = 0; i < 5 * s; ++i) {
        points.push_back(uniform_point(bounds, rng));
        labels.push_back(static_cast<double>(i % 5));
    }
    const RbfModel model = train(points, labels, bounds);
    const Vector x = uniform_point(bounds, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict(x));
    }
}
BENCHMARK(BM_RbfPredict)->Arg(20)->Arg(100);

void BM_SuiteEvaluate(benchmark::State& state) {
    const BenchmarkFunction fn = make_function(static_cast<int>(state.range(0)), 1000, 1);
    Rng rng(3);
    const Vector x = uniform_point(fn.bounds(), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fn.evaluate(x));
    }
}
BENCHMARK(BM_SuiteEvaluate)->DenseRange(1, 18, 1);

void BM_SaccGeneration(benchmark::State& state) {
    const BenchmarkFunction fn = make_function(1, 100, 1);
    const Decomposition dec = block_decompose(fn.bounds(), 20);
    SaccOptimizer opt(fn, dec, SaccParams{}, 1, 1u << 30);
    for (auto _ : state) {
        benchmark::DoNotOptimize(opt.step());
    }
}
BENCHMARK(BM_SaccGeneration);

}  // namespace

BENCHMARK_MAIN();
