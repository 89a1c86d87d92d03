#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/kernels.hpp"

namespace kernelforge {

// A family of candidate kernel matrices over the same point set, plus the
// trace budget c that the learned combination sum_i mu_i K_i must satisfy
// through sum_i mu_i trace(K_i) = c.
struct KernelFamily {
  std::vector<KernelMatrix> candidates;
  std::vector<double> traces;   // trace over all n points, per candidate
  double budget = 0.0;

  std::size_t m() const { return candidates.size(); }
  std::size_t n() const {
    return candidates.empty() ? 0 : candidates.front().entries.size();
  }
  std::size_t n_tr() const {
    return candidates.empty() ? 0 : candidates.front().n_tr;
  }
};

// Validates shapes and fills traces from the matrices. Throws EmptyFamily,
// DimensionMismatch on ragged candidates, ZeroTrace on a non-positive
// candidate trace, TraceBudgetNonpositive on budget <= 0.
KernelFamily make_family(std::vector<KernelMatrix> candidates, double budget);

}  // namespace kernelforge
