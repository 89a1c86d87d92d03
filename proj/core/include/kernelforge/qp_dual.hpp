#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "kernelforge/matrix.hpp"

namespace kernelforge {

// Margin configuration for
//   max 2 alpha^T e - alpha^T (G + tau I) alpha
//   s.t. 0 <= alpha <= C,  alpha^T y = 0.
// C is infinity for unbounded boxes (hard margin and the 2-norm case);
// the 2-norm margin with parameter C maps to tau = 1/C with no box.
struct MarginParams {
  double c = std::numeric_limits<double>::infinity();
  double tau = 0.0;

  bool bounded() const { return c != std::numeric_limits<double>::infinity(); }

  static MarginParams hard();
  static MarginParams soft_l1(double c);
  static MarginParams soft_l2(double c);
  static MarginParams generalized(double c, double tau);
};

struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double objective = 0.0;     // 2 a^T e - a^T (G + tau I) a at alpha
  double kkt_residual = 0.0;  // see check_kkt
  double gap = 0.0;           // first-order optimality gap estimate
  std::vector<std::size_t> support_indices;  // alpha_i > 1e-9
  std::size_t iterations = 0;                // pair updates performed
};

// Pairwise coordinate ascent over maximally violating pairs. Terminates
// when the KKT residual drops to kkt_tol; throws NoConvergence after 1e6
// pair updates or when the objective is unbounded along a feasible ray.
// Validates labels (both classes required) and that G is psd within
// psd_tol relative to 1 + max|G|.
DualSolution solve_generalized_measure(const SymMatrix& g, const std::vector<int>& y,
                                       const MarginParams& params,
                                       double kkt_tol = 1e-8, double psd_tol = 1e-9);

// Bias from free support vectors (0 < alpha_i < C, tolerance 1e-7):
// the mean of y_i (1 - tau alpha_i) - sum_j alpha_j y_j K_ji. With no free
// support vector, falls back to the midpoint of the interval the bound
// constraints leave feasible for the bias.
double recover_bias(const DualSolution& sol, const SymMatrix& k_tr,
                    const std::vector<int>& y, const MarginParams& params);

// f_j = sum_i alpha_i y_i K_cross(i, j) + bias.
std::vector<double> decision_values(const DualSolution& sol, const std::vector<int>& y,
                                    const Matrix& k_cross);

// Label from a decision value; ties at zero go to +1.
inline int predict_label(double f) { return f >= 0.0 ? 1 : -1; }

// KKT residual at sol.alpha: the smallest worst-case violation over any
// choice of the equality multiplier, given the movable directions the box
// leaves open. Zero exactly at optima, and zero at alpha = 0 when the box
// is degenerate (C -> 0 collapses every coordinate).
double check_kkt(const DualSolution& sol, const SymMatrix& g, const std::vector<int>& y,
                 const MarginParams& params);

}  // namespace kernelforge
