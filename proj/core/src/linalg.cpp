#include "kernelforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kernelforge {
namespace linalg {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

Matrix cholesky(const SymMatrix& s) {
  const std::size_t n = s.size();
  const double floor = kPivotTol * (1.0 + s.max_abs());
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = s(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      if (i == j) {
        if (acc <= floor) throw NotPositiveDefinite(i);
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return l;
}

std::vector<double> forward_subst(const Matrix& l, const std::vector<double>& rhs) {
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw DimensionMismatch("forward_subst: size mismatch");
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = rhs[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * z[k];
    z[i] = acc / l(i, i);
  }
  return z;
}

std::vector<double> back_subst(const Matrix& l, const std::vector<double>& rhs) {
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw DimensionMismatch("back_subst: size mismatch");
  std::vector<double> z(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * z[k];
    z[ii] = acc / l(ii, ii);
  }
  return z;
}

Matrix forward_subst_multi(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  if (b.rows() != n) throw DimensionMismatch("forward_subst_multi: size mismatch");
  Matrix z(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b(i, c);
      for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * z(k, c);
      z(i, c) = acc / l(i, i);
    }
  }
  return z;
}

std::vector<double> solve_spd(const SymMatrix& s, const std::vector<double>& rhs) {
  Matrix l = cholesky(s);
  return back_subst(l, forward_subst(l, rhs));
}

namespace {

// One Jacobi rotation zeroing a(p,q), accumulating into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::fabs(theta) > 1e+15) {
    t = 1.0 / (2.0 * theta);
  } else {
    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  const double app = a(p, p), aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(p, k) = a(k, p);
    a(k, q) = s * akp + c * akq;
    a(q, k) = a(k, q);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

double max_offdiag(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  }
  return m;
}

}  // namespace

EigenDecomposition eigen_sym(const SymMatrix& s) {
  const std::size_t n = s.size();
  Matrix a = s.to_dense();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double stop = kJacobiTol * s.max_abs();
  int sweep = 0;
  while (max_offdiag(a) > stop) {
    if (++sweep > kJacobiMaxSweeps) {
      throw NoConvergence("eigen_sym: Jacobi sweeps exceeded " +
                          std::to_string(kJacobiMaxSweeps));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition dec;
  dec.values.resize(n);
  dec.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    dec.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) dec.vectors(r, k) = v(r, order[k]);
  }
  return dec;
}

bool is_psd(const SymMatrix& s, double tol) {
  if (s.size() == 0) return true;
  EigenDecomposition dec = eigen_sym(s);
  return dec.values.front() >= -tol * (1.0 + s.max_abs());
}

SymMatrix schur_complement(const SymMatrix& x, std::size_t split) {
  const std::size_t n = x.size();
  if (split == 0 || split >= n) {
    throw DimensionMismatch("schur_complement: split must satisfy 1 <= split < n");
  }
  const std::size_t m = n - split;
  SymMatrix a(split);
  Matrix b(split, m);
  for (std::size_t i = 0; i < split; ++i) {
    for (std::size_t j = 0; j <= i; ++j) a.ref(i, j) = x(i, j);
    for (std::size_t j = 0; j < m; ++j) b(i, j) = x(i, split + j);
  }
  Matrix l;
  try {
    l = cholesky(a);
  } catch (const NotPositiveDefinite& e) {
    throw SingularLeadingBlock(e.row());
  }
  // W = L^{-1} B, so B^T A^{-1} B = W^T W.
  Matrix w = forward_subst_multi(l, b);
  SymMatrix out(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < split; ++k) acc += w(k, i) * w(k, j);
      out.ref(i, j) = x(split + i, split + j) - acc;
    }
  }
  return out;
}

}  // namespace linalg
}  // namespace kernelforge
