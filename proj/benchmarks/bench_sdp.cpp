#include <benchmark/benchmark.h>

#include <random>

#include "kernelforge/sdp.hpp"

using namespace kernelforge;

namespace {

// min u with f0 - u I <= 0; optimum is the top eigenvalue of f0.
SdpProblem spectral_problem(std::size_t dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  SymMatrix f0(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j <= i; ++j) f0.ref(i, j) = unif(rng);
  SdpProblem p;
  p.q = 1;
  p.objective = {1.0};
  LmiBlock blk;
  blk.f.push_back(f0);
  blk.f.push_back(SymMatrix::identity(dim, -1.0));
  p.blocks.push_back(std::move(blk));
  return p;
}

}  // namespace

static void BM_SpectralBound(benchmark::State& state) {
  const auto p = spectral_problem(state.range(0), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sdp(p));
  }
}
BENCHMARK(BM_SpectralBound)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_SpectralBoundTight(benchmark::State& state) {
  const auto p = spectral_problem(state.range(0), 5);
  SdpOptions opts;
  opts.gap_tol = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sdp(p, opts));
  }
}
BENCHMARK(BM_SpectralBoundTight)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
