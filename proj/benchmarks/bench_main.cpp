#include <benchmark/benchmark.h>

#include "hawkes_lab/linalg.hpp"
#include "hawkes_lab/model.hpp"
#include "hawkes_lab/rng.hpp"
#include "hawkes_lab/simulator.hpp"
#include "hawkes_lab/statistics.hpp"

using namespace hawkes_lab;

namespace {

HawkesModel fig1_model() {
  return HawkesModel({2.0, 3.0}, Matrix{{0.5, 2.0}, {2.0, 0.5}}, {4.0, 4.0},
                     {MarkDistribution::exponential(1.0), MarkDistribution::exponential(1.0)});
}

void BM_Simulate(benchmark::State& state) {
  const auto m = fig1_model();
  const double T = static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  std::size_t events = 0;
  for (auto _ : state) {
    const auto p = simulate(m, T, derive_stream_key(1, seed++));
    events += p.events.size();
    benchmark::DoNotOptimize(p.int_lambda.data());
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CltSample(benchmark::State& state) {
  const auto m = fig1_model();
  const auto p = simulate(m, 1000.0, 3);
  const CltEvaluator eval(m, 1000.0, {0.5, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(eval(p));
}
BENCHMARK(BM_CltSample);

void BM_MatExp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(4);
  Matrix m(n, n);
  for (auto& x : m.data()) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::mat_exp(m, 1.0));
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(8)->Arg(32);

void BM_Eigenvalues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(5);
  Matrix m(n, n);
  for (auto& x : m.data()) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::eigenvalues(m));
}
BENCHMARK(BM_Eigenvalues)->Arg(2)->Arg(8)->Arg(32);

void BM_PhiloxUniform(benchmark::State& state) {
  RandomStream rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_PhiloxUniform);

void BM_Normal(benchmark::State& state) {
  RandomStream rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_Normal);

}  // namespace

BENCHMARK_MAIN();
