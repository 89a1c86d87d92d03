#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "kernelforge/errors.hpp"

namespace kernelforge {

// Dense rectangular matrix, row-major.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// Symmetric matrix storing the lower triangle only, so symmetry is
// structural rather than a runtime invariant. Constructing from a full
// square array averages the (i,j) and (j,i) inputs.
class SymMatrix {
 public:
  SymMatrix() : n_(0) {}
  explicit SymMatrix(std::size_t n) : n_(n), tri_(n * (n + 1) / 2, 0.0) {}

  // Full row-major input of n*n values; mirror entries are averaged.
  SymMatrix(std::size_t n, const std::vector<double>& full) : SymMatrix(n) {
    if (full.size() != n * n) {
      throw DimensionMismatch("SymMatrix: expected n*n values");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        tri_[idx(i, j)] = 0.5 * (full[i * n + j] + full[j * n + i]);
      }
    }
  }

  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t n = rows.size();
    std::vector<double> full;
    full.reserve(n * n);
    for (const auto& row : rows) {
      if (row.size() != n) {
        throw DimensionMismatch("SymMatrix::from_rows: ragged input");
      }
      full.insert(full.end(), row.begin(), row.end());
    }
    return SymMatrix(n, full);
  }

  static SymMatrix identity(std::size_t n, double scale = 1.0) {
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.ref(i, i) = scale;
    return s;
  }

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return i >= j ? tri_[idx(i, j)] : tri_[idx(j, i)];
  }

  // Writable slot; (i,j) and (j,i) share storage.
  double& ref(std::size_t i, std::size_t j) {
    return i >= j ? tri_[idx(i, j)] : tri_[idx(j, i)];
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : tri_) {
      double a = v < 0 ? -v : v;
      if (a > m) m = a;
    }
    return m;
  }

  Matrix to_dense() const {
    Matrix d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) d(i, j) = (*this)(i, j);
    }
    return d;
  }

  // y = S x
  std::vector<double> apply(const std::vector<double>& x) const {
    if (x.size() != n_) throw DimensionMismatch("SymMatrix::apply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  // x^T S x
  double quad_form(const std::vector<double>& x) const {
    if (x.size() != n_) throw DimensionMismatch("SymMatrix::quad_form: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      acc += (*this)(i, i) * x[i] * x[i];
      for (std::size_t j = 0; j < i; ++j) acc += 2.0 * (*this)(i, j) * x[i] * x[j];
    }
    return acc;
  }

  // S += a * T
  void add_scaled(const SymMatrix& t, double a) {
    if (t.size() != n_) throw DimensionMismatch("SymMatrix::add_scaled: size mismatch");
    for (std::size_t k = 0; k < tri_.size(); ++k) tri_[k] += a * t.tri_[k];
  }

  void scale(double a) {
    for (double& v : tri_) v *= a;
  }

 private:
  static std::size_t idx(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

  std::size_t n_;
  std::vector<double> tri_;
};

}  // namespace kernelforge
