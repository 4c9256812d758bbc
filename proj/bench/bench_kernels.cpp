#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mxw/kernels.hpp"
#include "mxw/multiplier.hpp"
#include "mxw/spectral.hpp"

using namespace mxw;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

std::vector<double> random_nodes(int dim, std::size_t nq, double radius) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<double> nodes(dim * nq);
  for (double& x : nodes) x = u(rng);
  return nodes;
}

void BM_MultiplySymbolLattice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g = Grid::make(3, n, 6.0);
  const Material3 mat = Material3::from_ab(4, 1);
  const cd w(0.8, 0.4);
  const Field c = to_spectrum(random_band_limited(g, 6, 1));
  const SymbolFn fn = [&](const Wavevector& xi) { return inverse_symbol(w, xi, mat); };
  const SymbolMatrix zero = SymbolMatrix::Zero(6, 6);
  for (auto _ : state) {
    Field work = c;
    benchmark::DoNotOptimize(multiply_symbol_lattice(g, 6, work.data.data(), fn, zero, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.points()));
}

void BM_NonuniformAnalysis(benchmark::State& state) {
  const Grid g = Grid::make(2, static_cast<int>(state.range(0)), 8.0);
  const Field f = random_band_limited(g, 3, 2);
  const std::size_t nq = 4096;
  const auto nodes = random_nodes(2, nq, 2.0);
  std::vector<cd> out(nq * 3);
  for (auto _ : state) {
    nonuniform_analysis(f, nodes.data(), nq, out.data(), exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(nq * g.points()));
}

void BM_NonuniformSynthesis(benchmark::State& state) {
  const Grid g = Grid::make(2, static_cast<int>(state.range(0)), 8.0);
  const std::size_t nq = 4096;
  const auto nodes = random_nodes(2, nq, 2.0);
  std::vector<cd> coef(nq * 3, cd(0.5, -0.25));
  std::vector<cd> out(g.points() * 3);
  for (auto _ : state) {
    std::fill(out.begin(), out.end(), cd(0.0));
    nonuniform_synthesis(g, 3, nodes.data(), coef.data(), nq, out.data(), exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(nq * g.points()));
}

}  // namespace

// Second argument: 0 serial reference, 1 OpenMP kernel.
BENCHMARK(BM_MultiplySymbolLattice)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonuniformAnalysis)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonuniformSynthesis)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
