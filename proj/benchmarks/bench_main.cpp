// Throughput benchmarks for the hot paths: banded solves, transfer-function
// evaluation as the grid grows, and time stepping of the semi-discrete
// system.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bcsys/banded.hpp"
#include "bcsys/simulator.hpp"
#include "bcsys/spec_io.hpp"
#include "bcsys/transfer.hpp"

namespace {

using bcsys::cxd;

bcsys::SystemSpec string_spec() {
  return bcsys::parse_spec_file(std::string(BCSYS_EXAMPLES_DIR) +
                                "/beam_viscous.spec");
}

bcsys::BandedMatrix random_banded(std::size_t n, std::size_t band,
                                  std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  bcsys::BandedMatrix a(n, band, band);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > band ? i - band : 0;
    const std::size_t j1 = std::min(n - 1, i + band);
    for (std::size_t j = j0; j <= j1; ++j) {
      a.set(i, j, cxd(dist(rng) + (i == j ? 4.0 : 0.0), dist(rng)));
    }
  }
  return a;
}

void BM_banded_factor_solve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(12);
  bcsys::BandedMatrix a = random_banded(n, 3, rng);
  std::vector<cxd> b(n, cxd(1.0, -0.5));
  for (auto _ : state) {
    bcsys::BandedLU lu(a);
    benchmark::DoNotOptimize(lu.solve(b));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_banded_factor_solve)->Range(256, 16384)->Complexity();

void BM_transfer_evaluation(benchmark::State& state) {
  const std::size_t N = static_cast<std::size_t>(state.range(0));
  const bcsys::SystemSpec spec = string_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcsys::evaluate_transfer(spec, cxd(2.0, 3.0), N));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_transfer_evaluation)->Arg(251)->Arg(501)->Arg(1001)->Arg(2001)
    ->Complexity();

void BM_simulation_steps(benchmark::State& state) {
  const std::size_t N = static_cast<std::size_t>(state.range(0));
  const bcsys::SystemSpec spec = string_spec();
  const bcsys::DiscreteSystem disc = bcsys::discretize(spec, N);
  bcsys::GridFunction x0{spec.n, N,
                         std::vector<cxd>(spec.n * N, cxd(0.1, 0.0))};
  const bcsys::InputSignal u = bcsys::InputSignal::zero(disc.num_inputs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcsys::simulate(disc, x0, u, 0.1, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * 100);  // steps per run
}
BENCHMARK(BM_simulation_steps)->Arg(100)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
