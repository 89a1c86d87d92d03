#pragma once

// Seeded instance generators shared across test binaries. Every generator
// takes the engine by reference so call order fixes the instance stream.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "kernelforge/matrix.hpp"

namespace testsupport {

using kernelforge::Matrix;
using kernelforge::SymMatrix;

inline std::mt19937 make_rng(unsigned seed) { return std::mt19937(seed); }

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline SymMatrix random_sym(std::mt19937& rng, std::size_t n, double lo = -1.0,
                            double hi = 1.0) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) s.ref(i, j) = uniform(rng, lo, hi);
  }
  return s;
}

// A A^T with a square gaussian factor: positive semidefinite, possibly
// ill-conditioned.
inline SymMatrix random_psd(std::mt19937& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s.ref(i, j) = scale * acc / static_cast<double>(n);
    }
  }
  return s;
}

// Positive definite with spectrum bounded away from zero.
inline SymMatrix random_pd(std::mt19937& rng, std::size_t n, double ridge = 0.1) {
  SymMatrix s = random_psd(rng, n);
  for (std::size_t i = 0; i < n; ++i) s.ref(i, i) += ridge;
  return s;
}

// Mixed-sign label vector: at least one of each class.
inline std::vector<int> random_labels(std::mt19937& rng, std::size_t n) {
  std::vector<int> y(n);
  for (;;) {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = uniform_int(rng, 0, 1) == 0 ? -1 : 1;
      (y[i] > 0 ? pos : neg) = true;
    }
    if (pos && neg) return y;
  }
}

}  // namespace testsupport
