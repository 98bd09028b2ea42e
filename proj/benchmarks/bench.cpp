// Microbenchmarks for the hot paths: eigensolves across chain lengths, the
// scattering response, grid sweeps and the bisection search for the edge
// transition.

#include <benchmark/benchmark.h>

#include <vector>

#include "topolattice/lattice.hpp"
#include "topolattice/magnon.hpp"
#include "topolattice/scattering.hpp"
#include "topolattice/spectrum.hpp"
#include "topolattice/topology.hpp"

namespace {

using namespace topolattice;

LatticeSpec lossy_chain(int n_cells) {
  LatticeSpec spec;
  spec.n_cells = n_cells;
  spec.omega0_ghz = 5.48;
  spec.gamma_a_mhz = 36.0;
  spec.gamma_b_mhz = 73.0;
  spec.v_mhz = 208.5;
  spec.w_mhz = 335.5;
  return spec;
}

MagnonSpec sphere() {
  MagnonSpec magnon;
  magnon.site = 1;
  magnon.g0_mhz = 144.81;
  magnon.gamma_n_mhz = 16.0;
  magnon.c0_ghz = 3.2;
  magnon.c1_ghz_per_a = 0.42;
  return magnon;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

void BM_SpectrumOf(benchmark::State& state) {
  const LatticeSpec spec = lossy_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum_of(spec));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectrumOf)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_Eigendecompose(benchmark::State& state) {
  const ComplexMatrix h =
      build_chain_hamiltonian(lossy_chain(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigendecompose(h));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigendecompose)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_SMatrixPoint(benchmark::State& state) {
  const LatticeSpec spec = lossy_chain(6);
  PortConfig ports;
  ports.kappa1_mhz = ports.kappa2_mhz = 20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s_matrix(spec, ports, 5.48));
  }
}
BENCHMARK(BM_SMatrixPoint);

void BM_TransmissionMap(benchmark::State& state) {
  const LatticeSpec spec = lossy_chain(6);
  const MagnonSpec magnon = sphere();
  PortConfig ports;
  ports.kappa1_mhz = ports.kappa2_mhz = 20.0;
  const std::vector<double> currents = linspace(5.3, 5.6, 8);
  const std::vector<double> omegas =
      linspace(5.3, 5.66, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmission_map(spec, magnon, ports, currents, omegas));
  }
}
BENCHMARK(BM_TransmissionMap)->Arg(64)->Arg(256);

void BM_EdgeThreshold(benchmark::State& state) {
  const LatticeSpec spec = lossy_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(edge_sptb_threshold(spec));
  }
}
BENCHMARK(BM_EdgeThreshold)->Arg(4)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
