#include <benchmark/benchmark.h>

#include <memory>

#include "pnes/channel.hpp"
#include "pnes/criteria.hpp"
#include "pnes/families.hpp"
#include "pnes/nongauss.hpp"
#include "pnes/spectral.hpp"

using namespace pnes;

namespace {

DensityMatrix tmc_density(int dim) {
  return to_density(build({Family::TMC, solve_param_for_energy(Family::TMC, 1.0, dim), dim}));
}

DensityMatrix evolved(int dim) { return evolve(tmc_density(dim), 1.0, {1.0, 0.1}, {}); }

}  // namespace

static void BM_AncillaEvolve(benchmark::State& state) {
  const auto rho = tmc_density(static_cast<int>(state.range(0)));
  const ChannelParams p{1.0, state.range(1) ? 0.1 : 1e-3};
  for (auto _ : state) benchmark::DoNotOptimize(evolve_ancilla(rho, 1.0, p));
}
BENCHMARK(BM_AncillaEvolve)->Args({20, 0})->Args({20, 1})->Args({40, 1})->Unit(benchmark::kMillisecond);

static void BM_Rk4Step(benchmark::State& state) {
  const auto rho = evolved(static_cast<int>(state.range(0)));
  const ChannelParams p{1.0, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(rho, p));
}
BENCHMARK(BM_Rk4Step)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

static void BM_Realignment(benchmark::State& state) {
  const auto rho = evolved(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(realignment_test(rho));
}
BENCHMARK(BM_Realignment)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_MomentTest(benchmark::State& state) {
  const auto rho = evolved(20);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shchukin_vogel(rho, order));
}
BENCHMARK(BM_MomentTest)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SperlingVogel(benchmark::State& state) {
  const auto rho = evolved(20);
  const WitnessSet witnesses(20, 10000, 20240611);
  for (auto _ : state) benchmark::DoNotOptimize(sperling_vogel(rho, witnesses));
}
BENCHMARK(BM_SperlingVogel)->Unit(benchmark::kMillisecond);

static void BM_Entropy(benchmark::State& state) {
  const auto rho = evolved(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nongaussianity(rho));
}
BENCHMARK(BM_Entropy)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
