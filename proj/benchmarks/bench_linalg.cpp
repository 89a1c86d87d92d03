#include <benchmark/benchmark.h>

#include <random>

#include "kernelforge/linalg.hpp"

using namespace kernelforge;

namespace {

SymMatrix make_pd(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s.ref(i, j) = acc / n;
    }
    s.ref(i, i) += 0.5;
  }
  return s;
}

}  // namespace

static void BM_Cholesky(benchmark::State& state) {
  SymMatrix s = make_pd(state.range(0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::cholesky(s));
  }
}
BENCHMARK(BM_Cholesky)->Arg(8)->Arg(32)->Arg(96);

static void BM_EigenSym(benchmark::State& state) {
  SymMatrix s = make_pd(state.range(0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::eigen_sym(s));
  }
}
BENCHMARK(BM_EigenSym)->Arg(8)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
