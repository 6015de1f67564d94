#include <cmath>

#include <benchmark/benchmark.h>

#include "curlgap/eigensolver.hpp"
#include "curlgap/ground_state.hpp"
#include "curlgap/periodic_spectrum.hpp"
#include "curlgap/spectrum_assembly.hpp"

using namespace curlgap;

namespace {

const PiecewisePotential1D kKronigPenney{{0.0, 0.5}, {0.0, 10.0}};

Sampler designed_potential() {
  const double nu1 = band_edges(kKronigPenney, 1).edge(1);
  const auto W = design_potential(kKronigPenney, -nu1 + 1.0, 3.5, 0.5).radial.potential();
  return [W](double r, double z) { return W(r) + kKronigPenney(z); };
}

}  // namespace

static void BM_BandEdges(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(band_edges(kKronigPenney, K));
}
BENCHMARK(BM_BandEdges)->Arg(2)->Arg(8)->Arg(32);

static void BM_AssembleL(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CylGrid g(12.0, 8.0, n, n);
  const Sampler V = designed_potential();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_L(g, V));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_AssembleL)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EigsLowest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto op = assemble_L(CylGrid(12.0, 8.0, n, n), designed_potential());
  for (auto _ : state) benchmark::DoNotOptimize(eigs_lowest(op, 4));
}
BENCHMARK(BM_EigsLowest)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_EnergyAndGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Problem pr{CylGrid(12.0, 12.0, n, n), [](double, double) { return 1.0; }, [](double, double) { return 1.0; },
                   3.0, Mode::focusing, SpectrumSet::half_line(1.0), {}};
  const DiscreteProblem dp(pr);
  const Eigen::VectorXd u = scaled_seed(pr.grid, 1.0, 1.0).values();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dp.energy(u));
    benchmark::DoNotOptimize(dp.gradient(u));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pr.grid.size()));
}
BENCHMARK(BM_EnergyAndGradient)->Arg(64)->Arg(256);
BENCHMARK_MAIN();
