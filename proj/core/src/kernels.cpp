#include "kernelforge/kernels.hpp"

#include <cmath>
#include <string>

#include "kernelforge/errors.hpp"

namespace kernelforge {

KernelSpec KernelSpec::linear() { return KernelSpec{}; }

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  if (degree < 1) throw BadConfig("polynomial kernel needs degree >= 1");
  if (offset < 0.0) throw BadConfig("polynomial kernel needs offset >= 0");
  KernelSpec s;
  s.kind = Kind::kPolynomial;
  s.degree = degree;
  s.offset = offset;
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw BadConfig("gaussian kernel needs sigma > 0");
  KernelSpec s;
  s.kind = Kind::kGaussian;
  s.sigma = sigma;
  return s;
}

LabeledDataset::LabeledDataset(std::vector<std::vector<double>> points,
                               std::vector<int> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (labels_.size() > points_.size()) {
    throw DimensionMismatch("LabeledDataset: more labels than points");
  }
  const std::size_t d = points_.empty() ? 0 : points_.front().size();
  for (const auto& p : points_) {
    if (p.size() != d) {
      throw DimensionMismatch("LabeledDataset: points have mixed dimensions");
    }
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) {
      throw LabelOutOfRange("LabeledDataset: labels must be +1 or -1, got " +
                            std::to_string(y));
    }
  }
}

double eval_kernel(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("eval_kernel: size mismatch");
  switch (spec.kind) {
    case KernelSpec::Kind::kLinear: {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
      return acc;
    }
    case KernelSpec::Kind::kPolynomial: {
      double acc = spec.offset;
      for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
      double out = 1.0;
      for (int k = 0; k < spec.degree; ++k) out *= acc;
      return out;
    }
    case KernelSpec::Kind::kGaussian: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
      }
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
  }
  throw BadConfig("eval_kernel: unknown kernel kind");
}

KernelMatrix gram(const KernelSpec& spec, const LabeledDataset& data) {
  const std::size_t n = data.n();
  KernelMatrix k;
  k.entries = SymMatrix(n);
  k.n_tr = data.n_tr();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k.entries.ref(i, j) = eval_kernel(spec, data.points()[i], data.points()[j]);
    }
  }
  return k;
}

KernelMatrix trace_normalize(const KernelMatrix& k, double c) {
  if (!(c > 0.0)) throw TraceBudgetNonpositive();
  const double t = k.entries.trace();
  if (!(t > 0.0)) throw ZeroTrace();
  KernelMatrix out = k;
  out.entries.scale(c / t);
  return out;
}

KernelBlocks partition_blocks(const KernelMatrix& k) {
  if (k.n_tr == 0) throw EmptyTrainBlock();
  if (k.n_tr > k.n()) throw DimensionMismatch("partition_blocks: n_tr exceeds n");
  const std::size_t nt = k.n_t();
  KernelBlocks b;
  b.train = SymMatrix(k.n_tr);
  b.cross = Matrix(k.n_tr, nt);
  b.test = SymMatrix(nt);
  for (std::size_t i = 0; i < k.n_tr; ++i) {
    for (std::size_t j = 0; j <= i; ++j) b.train.ref(i, j) = k.entries(i, j);
    for (std::size_t j = 0; j < nt; ++j) b.cross(i, j) = k.entries(i, k.n_tr + j);
  }
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      b.test.ref(i, j) = k.entries(k.n_tr + i, k.n_tr + j);
    }
  }
  return b;
}

SymMatrix label_gram(const SymMatrix& k_tr, const std::vector<int>& y) {
  if (y.size() != k_tr.size()) {
    throw DimensionMismatch("label_gram: label count does not match block size");
  }
  for (int v : y) {
    if (v != 1 && v != -1) {
      throw LabelOutOfRange("label_gram: labels must be +1 or -1");
    }
  }
  SymMatrix g(k_tr.size());
  for (std::size_t i = 0; i < k_tr.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      g.ref(i, j) = static_cast<double>(y[i]) * static_cast<double>(y[j]) * k_tr(i, j);
    }
  }
  return g;
}

}  // namespace kernelforge
