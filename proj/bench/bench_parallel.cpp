// Serial reference vs OpenMP paths. Each pair computes identical results;
// only wall time differs.

#include <benchmark/benchmark.h>

#include "cfp/exact.hpp"
#include "cfp/simulate.hpp"

using namespace cfp;

namespace {

SimConfig ssa_config() {
  SimConfig c;
  c.n = 12;
  c.t_end = 500.0;
  c.burn_in = 5.0;
  c.seed = 42;
  c.replicas = 8;
  c.track_pair = true;
  return c;
}

void BM_SsaReplicasSerial(benchmark::State& state) {
  const Kernel k(KernelSpec::constant(1));
  const auto c = ssa_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_ssa_serial(k, c));
}

void BM_SsaReplicasOpenMP(benchmark::State& state) {
  const Kernel k(KernelSpec::constant(1));
  const auto c = ssa_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_ssa(k, c));
}

void BM_CnkEnumerationSerial(benchmark::State& state) {
  const Kernel k(KernelSpec::linear(Rational(1, 2)));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_cnk_enumeration_serial<LogReal>(k, n));
}

void BM_CnkEnumerationOpenMP(benchmark::State& state) {
  const Kernel k(KernelSpec::linear(Rational(1, 2)));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_cnk<LogReal>(k, n, CnkMethod::enumeration));
}

void BM_CnkRecurrence(benchmark::State& state) {
  const Kernel k(KernelSpec::linear(Rational(1, 2)));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_cnk<LogReal>(k, n));
}

}  // namespace

BENCHMARK(BM_SsaReplicasSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SsaReplicasOpenMP)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CnkEnumerationSerial)->Arg(30)->Arg(45)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CnkEnumerationOpenMP)->Arg(30)->Arg(45)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CnkRecurrence)->Arg(30)->Arg(45)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
