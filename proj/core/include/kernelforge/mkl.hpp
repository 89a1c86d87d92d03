#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/mkl_types.hpp"
#include "kernelforge/qp_dual.hpp"
#include "kernelforge/sdp.hpp"

namespace kernelforge {

enum class MklMode { kCuttingPlane, kSemidefinite };

// A learned kernel combination. The weights satisfy the trace budget
// sum_i mu_i trace(K_i) = c, shifted to sum_i mu_i trace(K_i) + tau n = c
// when the ridge is tuned. omega is the margin measure attained at the
// returned weights; dual holds the maximizing multipliers on the combined
// training gram, with the bias already recovered.
struct MklSolution {
  std::vector<double> mu;
  double tau = 0.0;            // learned ridge; zero unless tuned
  double omega = 0.0;
  double gap = 0.0;            // certificate gap at termination, nonnegative
  DualSolution dual;
  KernelMatrix combined;       // sum_i mu_i K_i over all points
  MklMode mode = MklMode::kCuttingPlane;
  bool degenerate = false;     // inner maximizer vanished; weights fell back to uniform
  std::size_t cuts = 0;        // outer rounds (cutting-plane mode only)
  std::size_t iterations = 0;  // inner QP updates plus outer Newton steps
};

// Minimizes the margin measure over nonnegative weights on the trace-budget
// slice by cutting planes: each round maximizes the dual at the current
// weights, records the resulting affine underestimator, and re-solves the
// master over the weight simplex until the evaluated value meets the
// certified lower bound within tol * (1 + |bound|). The master is solved
// through the interior-point path, so ties between equivalent candidates
// resolve to the analytic center (equal weights) deterministically.
// Throws NoConvergence when 500 rounds do not close the gap.
MklSolution solve_mkl_qcqp(const KernelFamily& family, const std::vector<int>& y,
                           const MarginParams& params, double tol = 1e-8);

// Minimizes the same measure with the weights constrained only by the trace
// budget and positive semidefiniteness of the combination, via the epigraph
// semidefinite program. Weights may come back negative when the optimal
// combination sits on the boundary of the psd cone; the value never exceeds
// the nonnegative-weight optimum. The dual multipliers are re-solved on the
// combined training gram, lifted by at most the builder jitter to clear the
// psd validation.
MklSolution solve_mkl_sdp(const KernelFamily& family, const std::vector<int>& y,
                          const MarginParams& params, double gap_tol = 1e-9);

// Joint search over weights and ridge: appends the identity to the family
// (trace n, so the budget splits as sum_i mu_i trace(K_i) + tau n = c) and
// runs the cutting-plane solve with a box-only margin. The identity weight
// is reported as tau and excluded from mu and the combined kernel; pass an
// infinite c_box for the unbounded margin.
MklSolution tune_tau_qcqp(const KernelFamily& family, const std::vector<int>& y,
                          double c_box, double tol = 1e-8);

// sum_i mu_i K_i over all points. Nonnegative weights keep psd candidates
// psd by construction; when any weight is negative the sum is checked
// spectrally and NonPsdCombination is thrown if the smallest eigenvalue
// falls below -psd_tol * (1 + max|entry|). Throws DimensionMismatch when
// the weight count differs from the family size.
KernelMatrix combine_kernels(const KernelFamily& family, const std::vector<double>& mu,
                             double psd_tol = 1e-7);

}  // namespace kernelforge
