#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/matrix.hpp"

namespace kernelforge {

// Eigenvalues ascending; vectors.col(k) is the unit eigenvector for values[k].
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

namespace linalg {

// Relative pivot floor for cholesky(): a pivot is rejected when it is
// <= kPivotTol * (1 + max|S|).
inline constexpr double kPivotTol = 1e-12;

// Jacobi sweep controls: rotations stop once max off-diagonal magnitude
// drops to kJacobiTol * max|S|; more than kJacobiMaxSweeps sweeps throws.
inline constexpr double kJacobiTol = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

// Lower-triangular factor L with S = L L^T. Throws NotPositiveDefinite
// with the offending row when a pivot falls below the relative floor.
Matrix cholesky(const SymMatrix& s);

// Cyclic Jacobi. Eigenvalues ascending, eigenvectors orthonormal columns.
// Throws NoConvergence after kJacobiMaxSweeps sweeps.
EigenDecomposition eigen_sym(const SymMatrix& s);

// True iff the smallest eigenvalue is >= -tol * (1 + max|S|).
bool is_psd(const SymMatrix& s, double tol = 1e-9);

// Schur complement of the leading split x split block:
//   S = C - B^T A^{-1} B for X = [[A, B], [B^T, C]].
// Requires 1 <= split < X.size(); throws SingularLeadingBlock if A is not
// positive definite.
SymMatrix schur_complement(const SymMatrix& x, std::size_t split);

// Solves S z = rhs through the Cholesky factorization.
std::vector<double> solve_spd(const SymMatrix& s, const std::vector<double>& rhs);

// Triangular solves against the factor from cholesky().
// forward: L z = rhs; backward: L^T z = rhs.
std::vector<double> forward_subst(const Matrix& l, const std::vector<double>& rhs);
std::vector<double> back_subst(const Matrix& l, const std::vector<double>& rhs);

// Columnwise forward substitution: solves L Z = B for rectangular B.
Matrix forward_subst_multi(const Matrix& l, const Matrix& b);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm_inf(const std::vector<double>& a);

}  // namespace linalg
}  // namespace kernelforge
