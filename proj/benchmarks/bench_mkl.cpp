#include <benchmark/benchmark.h>

#include <random>
#include <utility>
#include <vector>

#include "kernelforge/mkl.hpp"

using namespace kernelforge;

namespace {

struct Instance {
  KernelFamily family;
  std::vector<int> y;
};

Instance make_instance(std::size_t m, std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<KernelMatrix> cands;
  for (std::size_t c = 0; c < m; ++c) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
    KernelMatrix k;
    k.n_tr = n;
    k.entries = SymMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += a(i, l) * a(j, l);
        k.entries.ref(i, j) = acc / n;
      }
    }
    cands.push_back(std::move(k));
  }
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : -1;
  return {make_family(std::move(cands), static_cast<double>(n)), std::move(y)};
}

}  // namespace

static void BM_CuttingPlane(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), state.range(1), 23);
  const MarginParams params = MarginParams::soft_l1(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mkl_qcqp(inst.family, inst.y, params));
  }
}
BENCHMARK(BM_CuttingPlane)->Args({2, 16})->Args({4, 16})->Args({4, 64})->Args({8, 64});

static void BM_Semidefinite(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), state.range(1), 23);
  const MarginParams params = MarginParams::soft_l1(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mkl_sdp(inst.family, inst.y, params));
  }
}
BENCHMARK(BM_Semidefinite)->Args({2, 8})->Args({3, 12})->Args({4, 16});

static void BM_RidgeTuning(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), state.range(1), 23);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tune_tau_qcqp(inst.family, inst.y, 1.0));
  }
}
BENCHMARK(BM_RidgeTuning)->Args({2, 16})->Args({4, 32});

BENCHMARK_MAIN();
