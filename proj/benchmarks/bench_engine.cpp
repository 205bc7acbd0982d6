#include <benchmark/benchmark.h>

#include "cg/engine.hpp"
#include "cg/models.hpp"

namespace {

void BM_SampleSchedule(benchmark::State& state) {
  const auto model = cg::complete_graph(static_cast<std::size_t>(state.range(0)), 1.0);
  cg::Rng rng(1);
  for (auto _ : state) {
    auto schedule = cg::sample_schedule(model, cg::ClockKind::Exponential, rng);
    benchmark::DoNotOptimize(schedule);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(model.edge_count()));
}
BENCHMARK(BM_SampleSchedule)->Arg(50)->Arg(200);

void BM_RunDirect(benchmark::State& state) {
  const auto model = cg::complete_graph(static_cast<std::size_t>(state.range(0)), 1.0);
  const auto init = cg::MoneyState::simple(model.size());
  cg::Rng rng(2);
  const auto schedule = cg::sample_schedule(model, cg::ClockKind::Exponential, rng);
  for (auto _ : state) {
    auto result = cg::run_direct(schedule, init, rng);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_RunDirect)->Arg(50)->Arg(200);

void BM_RunToken(benchmark::State& state) {
  const auto model = cg::complete_graph(static_cast<std::size_t>(state.range(0)), 1.0);
  cg::Rng rng(3);
  const auto schedule = cg::sample_schedule(model, cg::ClockKind::Exponential, rng);
  for (auto _ : state) {
    auto run = cg::run_token(schedule, model.size(), rng);
    benchmark::DoNotOptimize(run);
  }
}
BENCHMARK(BM_RunToken)->Arg(50)->Arg(200);

void BM_RandomRegularGraph(benchmark::State& state) {
  cg::Rng rng(4);
  for (auto _ : state) {
    auto g = cg::random_regular_graph(static_cast<std::size_t>(state.range(0)), 10, rng);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_RandomRegularGraph)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
