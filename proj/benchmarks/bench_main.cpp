#include <benchmark/benchmark.h>

#include "pulsectl/oracle.hpp"
#include "pulsectl/pde_sim.hpp"
#include "pulsectl/regions.hpp"
#include "pulsectl/spectral.hpp"

using namespace pulsectl;

namespace {

ModelParams example(double gain) {
  ModelParams p;
  p.f_der = -3.0;
  p.to_log_der = 8.0;
  p.control_slope = gain;
  return p;
}

void BM_RTotal(benchmark::State& state) {
  const cplx z(0.5, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(r_total(z));
}
BENCHMARK(BM_RTotal);

void BM_ROracle(benchmark::State& state) {
  const cplx z(3.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(r_oracle(z));
}
BENCHMARK(BM_ROracle)->Unit(benchmark::kMillisecond);

void BM_SolveVin(benchmark::State& state) {
  const FastGrid grid;
  const cplx z(3.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_vin(z, grid));
}
BENCHMARK(BM_SolveVin)->Unit(benchmark::kMicrosecond);

void BM_AssembleSpectrum(benchmark::State& state) {
  const ModelParams p = example(static_cast<double>(-state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_spectrum(p));
}
BENCHMARK(BM_AssembleSpectrum)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_StabilityVerdict(benchmark::State& state) {
  const ModelParams p = example(-3.0);
  for (auto _ : state) benchmark::DoNotOptimize(stability_verdict(p));
}
BENCHMARK(BM_StabilityVerdict)->Unit(benchmark::kMillisecond);

void BM_MinControlGain(benchmark::State& state) {
  const ModelParams p = example(0.0);
  for (auto _ : state) benchmark::DoNotOptimize(min_control_gain(p));
}
BENCHMARK(BM_MinControlGain)->Unit(benchmark::kMillisecond);

void BM_SimStep(benchmark::State& state) {
  const PulseSimulation sim(SimConfig::from_params(example(-3.0)));
  SimState s = sim.perturbed();
  for (auto _ : state) {
    sim.step(s);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.config().nodes()));
}
BENCHMARK(BM_SimStep)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
