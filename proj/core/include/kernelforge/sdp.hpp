#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/matrix.hpp"
#include "kernelforge/mkl_types.hpp"
#include "kernelforge/qp_dual.hpp"

namespace kernelforge {

// One linear matrix inequality F(u) = f[0] + sum_k u_k f[k+1] <= 0 in the
// psd order. f.size() must be q+1 and every entry square of equal size.
struct LmiBlock {
  std::vector<SymMatrix> f;

  std::size_t dim() const { return f.empty() ? 0 : f.front().size(); }
};

// min c^T u  s.t.  every block F_b(u) <= 0  and  A u = b.
struct SdpProblem {
  std::size_t q = 0;
  std::vector<double> objective;
  std::vector<LmiBlock> blocks;
  Matrix eq_a;                // 0 x 0 when there are no equalities
  std::vector<double> eq_b;
};

struct SdpIterate {
  double weight;
  double primal;
  double dual;
};

struct SdpSolution {
  std::vector<double> u_opt;
  std::vector<SymMatrix> z_opt;   // dual block variables, psd
  double p_star = 0.0;
  double d_star = 0.0;
  double gap = 0.0;               // p_star - d_star
  std::size_t iterations = 0;     // Newton steps, both phases
  std::vector<SdpIterate> trace;  // one record per outer centering
};

struct SdpOptions {
  double gap_tol = 1e-7;          // stop at gap <= gap_tol * (1 + |p|)
  double newton_tol = 1e-13;      // half squared Newton decrement
  std::size_t max_newton = 300;   // per centering
  double weight_growth = 10.0;
  double initial_weight = 1.0;
  // Optional strictly feasible start of size q; when absent or not
  // strictly feasible, a phase-I problem finds one.
  std::vector<double> start;
  bool has_start = false;
};

// Log-barrier interior-point method. Equalities are eliminated through a
// null-space parameterization before centering; dual variables come from
// the scaled inverses of the slack blocks at the final center, making the
// reported duality gap a certificate. Throws Infeasible when no strictly
// feasible point exists (or equalities are inconsistent), Unbounded when a
// certified descent ray exists, NoConvergence otherwise on failure.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

// Dual of a single-block problem without equalities, expressed again as an
// SdpProblem over the entries of Z:
//   min -trace(Z F_0)  s.t.  -Z <= 0,  trace(Z F_k) = -c_k.
// Solving it yields the negated dual optimum of the primal.
SdpProblem sdp_dual(const SdpProblem& p);

// Variable layout shared by the LMI builders below. Offsets index into u.
struct KernelLearningSdp {
  SdpProblem problem;
  std::vector<double> start;      // strictly feasible by construction
  std::size_t m = 0;              // candidate count
  std::size_t mu_offset = 0;
  std::size_t nu_offset = 0;
  std::size_t delta_offset = SIZE_MAX;  // SIZE_MAX when the box is unbounded
  std::size_t tau_index = SIZE_MAX;     // set by the tau-tuning builder
  std::size_t lambda_index = 0;
  std::size_t t_index = 0;
};

// Kernel-weight learning as an SDP: minimize the epigraph variable t over
//   sum_i mu_i K_i psd, trace budget sum_i mu_i r_i = c, and the Schur-
//   complement LMI tying t to the margin dual on the training block.
// Box-bounded margins add slack multipliers delta >= 0 and the -2C delta^T e
// corner term; unbounded boxes drop them. The psd blocks carry a small
// diagonal jitter so boundary families (singular candidates) keep a
// strictly feasible interior; jitter is relative to the block scale.
KernelLearningSdp build_kernel_learning_sdp(const KernelFamily& family,
                                            const std::vector<int>& y,
                                            const MarginParams& params,
                                            double jitter = 1e-8);

// Same construction with tau as a decision variable: the trace budget
// becomes sum_i mu_i r_i + tau n = c, tau I enters the Schur block's
// leading diagonal, and tau >= 0 joins the scalar constraints.
KernelLearningSdp build_tau_tuning_sdp(const KernelFamily& family,
                                       const std::vector<int>& y, double c_box,
                                       double jitter = 1e-8);

}  // namespace kernelforge
