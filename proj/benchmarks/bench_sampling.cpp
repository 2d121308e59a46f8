#include <benchmark/benchmark.h>

#include "smx/overestimation.hpp"

namespace {

void BM_SampleThetaMax(benchmark::State& state) {
    const smx::ErrorModel model{static_cast<int>(state.range(0)), 1.0, 10000, 3};
    for (auto _ : state) {
        const auto est = smx::sample_theta(model, smx::OperatorSpec::max());
        benchmark::DoNotOptimize(est.mean);
    }
}
BENCHMARK(BM_SampleThetaMax)->Arg(5)->Arg(50);

void BM_PairedReductionSm2(benchmark::State& state) {
    const smx::ErrorModel model{static_cast<int>(state.range(0)), 1.0, 10000, 3};
    for (auto _ : state) {
        const auto est = smx::paired_theta_reduction(model, smx::OperatorSpec::sm2(10.0, 5.0));
        benchmark::DoNotOptimize(est.reduction_mean);
    }
}
BENCHMARK(BM_PairedReductionSm2)->Arg(5)->Arg(50);

}  // namespace
