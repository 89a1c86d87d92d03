#pragma once

#include <cstddef>
#include <vector>

#include "kernelforge/matrix.hpp"

namespace kernelforge {

// Closed-form kernel choices. Parameters are validated at construction:
// polynomial needs degree >= 1 and offset >= 0 (both keep the Gram psd),
// gaussian needs sigma > 0.
struct KernelSpec {
  enum class Kind { kLinear, kPolynomial, kGaussian };

  Kind kind = Kind::kLinear;
  int degree = 1;      // polynomial only
  double offset = 0.0; // polynomial only
  double sigma = 1.0;  // gaussian only

  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double offset);
  static KernelSpec gaussian(double sigma);
};

// Points with labels on a leading block. Points keep their input order:
// the first labels.size() points are labeled (+1/-1), the rest form the
// unlabeled tail whose ground truth is not stored here.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<std::vector<double>> points, std::vector<int> labels);

  std::size_t n() const { return points_.size(); }
  std::size_t n_tr() const { return labels_.size(); }
  std::size_t n_t() const { return points_.size() - labels_.size(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_.front().size(); }

  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::vector<std::vector<double>> points_;
  std::vector<int> labels_;
};

// Kernel matrix over all points, labeled block first.
struct KernelMatrix {
  SymMatrix entries;
  std::size_t n_tr = 0;

  std::size_t n() const { return entries.size(); }
  std::size_t n_t() const { return entries.size() - n_tr; }
};

struct KernelBlocks {
  SymMatrix train;   // n_tr x n_tr
  Matrix cross;      // n_tr x n_t
  SymMatrix test;    // n_t x n_t
};

double eval_kernel(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y);

// Gram matrix over every point in the dataset, in dataset order.
KernelMatrix gram(const KernelSpec& spec, const LabeledDataset& data);

// Returns (c / trace(K)) * K. Throws ZeroTrace when trace(K) <= 0 and
// TraceBudgetNonpositive when c <= 0.
KernelMatrix trace_normalize(const KernelMatrix& k, double c);

// Splits into train / cross / test blocks. Requires n_tr >= 1.
KernelBlocks partition_blocks(const KernelMatrix& k);

// G = diag(y) K diag(y) over the training block.
SymMatrix label_gram(const SymMatrix& k_tr, const std::vector<int>& y);

}  // namespace kernelforge
