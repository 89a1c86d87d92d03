#pragma once

// Grid-search oracle for
//   max 2 alpha^T e - alpha^T Q alpha   s.t.  0 <= alpha <= C, alpha^T y = 0.
//
// The equality makes the last coordinate dependent (labels are +/-1, so the
// dependent coordinate stays on the step lattice), and the free coordinates
// are enumerated on a grid that contracts around the incumbent: start at a
// coarse step over the full box, expand the window whenever the incumbent
// lands on its edge, halve the step until it reaches the target, and finish
// with a full enumeration at exactly the target step. The objective is
// concave, so the contraction is a hill climb over nested full grids; tests
// additionally cross-check the result against the active-set enumeration
// reference, which is exact.

#include <cmath>
#include <limits>
#include <vector>

#include "kernelforge/matrix.hpp"
#include "support/small_lu.hpp"

namespace testsupport {

struct GridResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> alpha;
};

namespace griddetail {

inline double eval(const kernelforge::SymMatrix& q, const std::vector<double>& a) {
  double lin = 0.0;
  for (double v : a) lin += v;
  return 2.0 * lin - q.quad_form(a);
}

// Smallest eigenvalue estimate by inverse power iteration on the oracle's
// own LU solver. Only used to size the search box for the unbounded case.
inline double min_eig_estimate(const kernelforge::SymMatrix& q) {
  const std::size_t n = q.size();
  std::vector<double> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = q(i, j);
  }
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 1.0;
  for (int it = 0; it < 80; ++it) {
    auto w = lu_solve(flat, v, n);
    if (!w) return 1e-6;
    double norm = 0.0;
    for (double x : *w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 1e-6;
    double rho = 0.0;  // v^T Q^{-1} v with v unit: converges to 1/lmin
    for (std::size_t i = 0; i < n; ++i) rho += v[i] * (*w)[i];
    lambda = rho > 0 ? 1.0 / rho : 1e-6;
    for (std::size_t i = 0; i < n; ++i) v[i] = (*w)[i] / norm;
  }
  return lambda;
}

}  // namespace griddetail

// step_target is the final grid step (1e-3 in the acceptance suite).
inline GridResult grid_qp_oracle(const kernelforge::SymMatrix& g,
                                 const std::vector<int>& y, double c, double tau,
                                 double step_target) {
  using griddetail::eval;
  const std::size_t n = y.size();
  kernelforge::SymMatrix q = g;
  for (std::size_t i = 0; i < n; ++i) q.ref(i, i) += tau;

  const bool bounded = std::isfinite(c);
  double box;
  if (bounded) {
    box = c;
  } else {
    // At the optimum 2 e^T a >= a^T Q a >= lmin |a|^2, so |a| is capped.
    const double lmin = std::max(griddetail::min_eig_estimate(q), 1e-6);
    box = 2.0 * (2.0 * std::sqrt(static_cast<double>(n)) / lmin) + 1.0;
  }

  const std::size_t nfree = n - 1;
  const std::size_t dep = n - 1;

  GridResult best;
  std::vector<double> alpha(n, 0.0);

  // Enumerates offsets k in [-radius, radius] per free dim around the
  // center (given in units of the current step) and updates the incumbent.
  std::vector<long> center(nfree, 0);
  auto sweep = [&](double h, long radius) {
    std::vector<long> k(nfree, -radius);
    std::vector<long> best_k = center;
    bool improved_any = false;
    for (;;) {
      bool ok = true;
      double eqsum = 0.0;
      for (std::size_t i = 0; i < nfree && ok; ++i) {
        const long cell = center[i] + k[i];
        const double v = static_cast<double>(cell) * h;
        if (cell < 0 || v > box + 1e-12) {
          ok = false;
        } else {
          alpha[i] = v;
          eqsum += static_cast<double>(y[i]) * v;
        }
      }
      if (ok) {
        const double ad = -static_cast<double>(y[dep]) * eqsum;
        if (ad >= -1e-12 && ad <= box + 1e-12) {
          alpha[dep] = std::max(ad, 0.0);
          const double val = eval(q, alpha);
          if (val > best.value) {
            best.value = val;
            best.alpha = alpha;
            for (std::size_t i = 0; i < nfree; ++i) best_k[i] = center[i] + k[i];
            improved_any = true;
          }
        }
      }
      std::size_t d = 0;
      while (d < nfree && k[d] == radius) {
        k[d] = -radius;
        ++d;
      }
      if (d == nfree) break;
      ++k[d];
    }
    bool on_edge = false;
    for (std::size_t i = 0; i < nfree; ++i) {
      if (std::labs(best_k[i] - center[i]) == radius) on_edge = true;
    }
    center = best_k;
    (void)improved_any;
    return on_edge;
  };

  // Coarse pass over the whole box: center mid-box, radius half the box.
  double h = box / 20.0;
  if (h < step_target) h = step_target;
  center.assign(nfree, 10);
  sweep(h, 10);

  // Contract, expanding in place whenever the incumbent hits the edge.
  while (h > step_target) {
    for (int guard = 0; guard < 64 && sweep(h, 3); ++guard) {
    }
    const double next = std::max(h / 2.0, step_target);
    // Re-express the center in units of the finer step.
    const double ratio = h / next;
    for (auto& cell : center) {
      cell = static_cast<long>(std::llround(static_cast<double>(cell) * ratio));
    }
    h = next;
  }

  // Final enumeration at exactly the target step.
  for (int guard = 0; guard < 128 && sweep(h, 10); ++guard) {
  }
  return best;
}

}  // namespace testsupport
