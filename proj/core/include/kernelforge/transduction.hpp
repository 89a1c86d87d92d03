#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/kernels.hpp"
#include "kernelforge/mkl.hpp"

namespace kernelforge {

enum class LearnMode { kCuttingPlane, kSemidefinite, kTuneRidge };

// Settings for labeling the unlabeled tail of a dataset. The candidate list
// must not be empty; a nonpositive trace budget selects the default of one
// unit per point (c = n).
struct TransduceConfig {
  std::vector<KernelSpec> kernels;
  double trace_budget = 0.0;
  MarginParams margin;
  LearnMode mode = LearnMode::kCuttingPlane;
  double tol = 1e-8;
};

struct TransduceResult {
  MklSolution learned;
  std::vector<double> decision;  // decision values on the unlabeled tail
  std::vector<int> predicted;    // sign labels for the tail, ties to +1
};

// Gram matrices for every candidate kernel over all points of the dataset,
// packed into a family with the given trace budget.
KernelFamily build_family(const std::vector<KernelSpec>& kernels,
                          const LabeledDataset& data, double budget);

// Learns the kernel combination on the labeled block, then labels the tail
// by the sign of the decision function there. kTuneRidge learns the ridge
// itself, so it requires margin.tau == 0 and throws BadConfig otherwise.
TransduceResult transduce(const LabeledDataset& data, const TransduceConfig& config);

// Accuracy and confusion counts of predictions against reference labels,
// +1 being the positive class. Empty inputs count as vacuously accurate.
struct Evaluation {
  double accuracy = 1.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

Evaluation evaluate_labels(const std::vector<int>& predicted,
                           const std::vector<int>& reference);

}  // namespace kernelforge
