#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kernelforge/qp_dual.hpp"

using namespace kernelforge;

namespace {

struct Instance {
  SymMatrix g;
  std::vector<int> y;
};

Instance make_instance(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
  SymMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      g.ref(i, j) = acc / n;
    }
    g.ref(i, i) += 0.1;
  }
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : -1;
  return {std::move(g), std::move(y)};
}

}  // namespace

static void BM_HardMargin(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_generalized_measure(inst.g, inst.y, MarginParams::hard()));
  }
}
BENCHMARK(BM_HardMargin)->Arg(16)->Arg(64)->Arg(128);

static void BM_BoxedMargin(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_generalized_measure(inst.g, inst.y, MarginParams::soft_l1(1.0)));
  }
}
BENCHMARK(BM_BoxedMargin)->Arg(16)->Arg(64)->Arg(128);

static void BM_RidgedMargin(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_generalized_measure(inst.g, inst.y, MarginParams::soft_l2(1.0)));
  }
}
BENCHMARK(BM_RidgedMargin)->Arg(16)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
