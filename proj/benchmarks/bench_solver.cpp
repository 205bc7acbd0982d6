#include <benchmark/benchmark.h>

#include "cg/solver.hpp"

namespace {

void BM_SolveDary(benchmark::State& state) {
  const cg::solver::Grid grid;
  for (auto _ : state) {
    auto table = cg::solver::solve_dary_fixed_point(static_cast<std::size_t>(state.range(0)), grid);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_SolveDary)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolveGwFine(benchmark::State& state) {
  const auto offspring = cg::GwOffspring::poisson(1.0);
  const cg::solver::Grid grid{static_cast<std::size_t>(state.range(0)) + 1,
                              1.0 / static_cast<double>(state.range(0)), 1.0};
  for (auto _ : state) {
    auto table = cg::solver::solve_gw(offspring, grid);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_SolveGwFine)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SolveRegular(benchmark::State& state) {
  const cg::solver::Grid grid;
  for (auto _ : state) {
    auto table = cg::solver::solve_r_regular(10, grid);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_SolveRegular)->Unit(benchmark::kMillisecond);

}  // namespace
