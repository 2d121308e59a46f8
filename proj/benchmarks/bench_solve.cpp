#include <benchmark/benchmark.h>

#include "smx/mdp.hpp"
#include "smx/solve.hpp"

namespace {

void BM_GeneralizedBackup(benchmark::State& state) {
    const smx::TabularMdp m =
        smx::random_mdp(static_cast<int>(state.range(0)), 5, 3, 1, 0.9, 1.0);
    smx::QTable q = smx::QTable::zeros(m.n_states, m.n_actions);
    for (auto _ : state) {
        q = smx::generalized_backup(m, q, smx::OperatorSpec::sm2(10.0, 5.0));
        benchmark::DoNotOptimize(q.values.data());
    }
}
BENCHMARK(BM_GeneralizedBackup)->Arg(20)->Arg(50);

void BM_ValueIterationToFixedPoint(benchmark::State& state) {
    const smx::TabularMdp m =
        smx::random_mdp(static_cast<int>(state.range(0)), 5, 3, 1, 0.9, 1.0);
    for (auto _ : state) {
        const smx::SolveResult res =
            smx::value_iteration(m, smx::OperatorSpec::sm2(10.0, 5.0), 1e-10);
        benchmark::DoNotOptimize(res.iterations);
    }
}
BENCHMARK(BM_ValueIterationToFixedPoint)->Arg(20)->Arg(50);

}  // namespace
