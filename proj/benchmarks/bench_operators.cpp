#include <benchmark/benchmark.h>

#include <vector>

#include "smx/operators.hpp"
#include "smx/rng.hpp"

namespace {

std::vector<double> make_q(int n) {
    smx::Rng rng(7);
    std::vector<double> q(static_cast<std::size_t>(n));
    rng.fill_uniform(q, -5.0, 5.0);
    return q;
}

void BM_Max(benchmark::State& state) {
    const auto q = make_q(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(smx::max_value(q));
}
BENCHMARK(BM_Max)->Arg(5)->Arg(50);

void BM_Mellowmax(benchmark::State& state) {
    const auto q = make_q(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(smx::mellowmax(q, 5.0));
}
BENCHMARK(BM_Mellowmax)->Arg(5)->Arg(50);

void BM_SoftMellowmax(benchmark::State& state) {
    const auto q = make_q(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(smx::soft_mellowmax(q, 10.0, 5.0));
}
BENCHMARK(BM_SoftMellowmax)->Arg(5)->Arg(50);

void BM_SoftmaxWeights(benchmark::State& state) {
    const auto q = make_q(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(smx::softmax_weights(q, 10.0));
}
BENCHMARK(BM_SoftmaxWeights)->Arg(5)->Arg(50);

}  // namespace
