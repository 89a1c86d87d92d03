#include "kernelforge/qp_dual.hpp"

#include <algorithm>
#include <cmath>

#include "kernelforge/errors.hpp"
#include "kernelforge/linalg.hpp"

namespace kernelforge {

namespace {

constexpr std::size_t kMaxPairUpdates = 1000000;
constexpr std::size_t kGradientRefreshPeriod = 4096;
constexpr double kSupportTol = 1e-9;
constexpr double kFreeSvTol = 1e-7;

void validate_margin(const MarginParams& p) {
  if (!(p.c > 0.0)) throw BadConfig("margin: C must be positive");
  if (!(p.tau >= 0.0)) throw BadConfig("margin: tau must be nonnegative");
}

void validate_labels(const std::vector<int>& y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw LabelOutOfRange("labels must be +1 or -1, got " + std::to_string(v));
    }
  }
  if (!pos || !neg) throw SingleClassLabels();
}

double q_entry(const SymMatrix& g, double tau, std::size_t i, std::size_t j) {
  return g(i, j) + (i == j ? tau : 0.0);
}

std::vector<double> gradient(const SymMatrix& g, double tau,
                             const std::vector<double>& alpha) {
  std::vector<double> grad = g.apply(alpha);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = 2.0 - 2.0 * (grad[i] + tau * alpha[i]);
  }
  return grad;
}

struct PairScan {
  double up = -std::numeric_limits<double>::infinity();    // max y_i g_i, movable up
  double down = std::numeric_limits<double>::infinity();   // min y_j g_j, movable down
  std::size_t i = SIZE_MAX;
  std::size_t j = SIZE_MAX;

  double residual() const {
    if (i == SIZE_MAX || j == SIZE_MAX) return 0.0;
    return std::max(0.0, 0.5 * (up - down));
  }
};

// The equality multiplier beta must satisfy beta >= y_i g_i wherever the
// objective could still improve by moving alpha_i one way, and
// beta <= y_j g_j for the other; the residual is half the infeasibility
// of that interval.
PairScan scan_pairs(const std::vector<double>& alpha, const std::vector<double>& grad,
                    const std::vector<int>& y, double c) {
  PairScan s;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const bool can_inc = alpha[k] < c;
    const bool can_dec = alpha[k] > 0.0;
    const double v = static_cast<double>(y[k]) * grad[k];
    if ((y[k] > 0 && can_inc) || (y[k] < 0 && can_dec)) {
      if (v > s.up) {
        s.up = v;
        s.i = k;
      }
    }
    if ((y[k] < 0 && can_inc) || (y[k] > 0 && can_dec)) {
      if (v < s.down) {
        s.down = v;
        s.j = k;
      }
    }
  }
  return s;
}

}  // namespace

MarginParams MarginParams::hard() { return MarginParams{}; }

MarginParams MarginParams::soft_l1(double c) {
  MarginParams p;
  p.c = c;
  validate_margin(p);
  return p;
}

MarginParams MarginParams::soft_l2(double c) {
  if (!(c > 0.0)) throw BadConfig("margin: C must be positive");
  MarginParams p;
  p.tau = 1.0 / c;
  return p;
}

MarginParams MarginParams::generalized(double c, double tau) {
  MarginParams p;
  p.c = c;
  p.tau = tau;
  validate_margin(p);
  return p;
}

DualSolution solve_generalized_measure(const SymMatrix& g, const std::vector<int>& y,
                                       const MarginParams& params, double kkt_tol,
                                       double psd_tol) {
  validate_margin(params);
  const std::size_t n = y.size();
  if (g.size() != n) {
    throw DimensionMismatch("solve_generalized_measure: G and labels disagree");
  }
  validate_labels(y);
  if (!linalg::is_psd(g, psd_tol)) {
    throw NonPsdGram("solve_generalized_measure: G has an eigenvalue below -" +
                     std::to_string(psd_tol) + " relative");
  }

  const double c = params.c;
  const double tau = params.tau;
  const double curv_floor = 1e-14 * (1.0 + g.max_abs() + tau);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, 2.0);

  std::size_t iters = 0;
  for (; iters < kMaxPairUpdates; ++iters) {
    if (iters > 0 && iters % kGradientRefreshPeriod == 0) {
      grad = gradient(g, tau, alpha);
    }
    const PairScan s = scan_pairs(alpha, grad, y, c);
    if (s.residual() <= kkt_tol) break;

    const std::size_t i = s.i;
    const std::size_t j = s.j;
    const double yi = y[i], yj = y[j];

    // Step d >= 0 along alpha_i += y_i d, alpha_j -= y_j d.
    const double slope = s.up - s.down;
    const double curv = q_entry(g, tau, i, i) + q_entry(g, tau, j, j) -
                        2.0 * yi * yj * q_entry(g, tau, i, j);

    double d_max = std::numeric_limits<double>::infinity();
    d_max = std::min(d_max, yi > 0 ? c - alpha[i] : alpha[i]);
    d_max = std::min(d_max, yj > 0 ? alpha[j] : c - alpha[j]);

    double d;
    if (curv > curv_floor) {
      d = std::min(slope / (2.0 * curv), d_max);
    } else {
      d = d_max;
    }
    if (!std::isfinite(d)) {
      throw NoConvergence(
          "solve_generalized_measure: dual objective is unbounded along a "
          "feasible ray (training data admits no finite-margin separation)");
    }

    alpha[i] += yi * d;
    alpha[j] -= yj * d;
    // Snap to the box so movability checks stay exact.
    const double snap = 1e-14 * (1.0 + std::fabs(alpha[i]) + std::fabs(alpha[j]));
    if (alpha[i] < snap) alpha[i] = 0.0;
    if (alpha[j] < snap) alpha[j] = 0.0;
    if (params.bounded()) {
      if (c - alpha[i] < snap) alpha[i] = c;
      if (c - alpha[j] < snap) alpha[j] = c;
    }

    for (std::size_t k = 0; k < n; ++k) {
      grad[k] -= 2.0 * d * (yi * q_entry(g, tau, k, i) - yj * q_entry(g, tau, k, j));
    }
  }
  if (iters == kMaxPairUpdates) {
    throw NoConvergence("solve_generalized_measure: pair update limit reached");
  }

  DualSolution sol;
  sol.alpha = std::move(alpha);
  sol.iterations = iters;

  grad = gradient(g, tau, sol.alpha);
  const PairScan s = scan_pairs(sol.alpha, grad, y, c);
  sol.kkt_residual = s.residual();

  double lin = 0.0, sq = 0.0;
  for (double a : sol.alpha) {
    lin += a;
    sq += a * a;
  }
  sol.objective = 2.0 * lin - g.quad_form(sol.alpha) - tau * sq;

  // Certificate-style gap at the midpoint multiplier: by concavity the
  // optimum exceeds the current value by at most the gradient mass the box
  // still leaves movable. Directions whose multiplier sits inside the KKT
  // tolerance are treated as closed.
  {
    double beta = 0.0;
    if (s.i != SIZE_MAX && s.j != SIZE_MAX) beta = 0.5 * (s.up + s.down);
    double gap = 0.0;
    for (std::size_t k = 0; k < sol.alpha.size(); ++k) {
      const double kappa = grad[k] - beta * static_cast<double>(y[k]);
      gap += std::max(0.0, -kappa * sol.alpha[k]);
      if (params.bounded()) {
        gap += std::max(0.0, kappa * (c - sol.alpha[k]));
      }
    }
    sol.gap = gap;
  }

  for (std::size_t k = 0; k < sol.alpha.size(); ++k) {
    if (sol.alpha[k] > kSupportTol) sol.support_indices.push_back(k);
  }

  // Bias directly from the gradient: for free i the equality multiplier is
  // y_i grad_i and the bias is half of it; otherwise take the midpoint of
  // the interval the bounds leave open.
  {
    double acc = 0.0;
    std::size_t free_count = 0;
    for (std::size_t k = 0; k < sol.alpha.size(); ++k) {
      if (sol.alpha[k] > kFreeSvTol && (!params.bounded() || sol.alpha[k] < c - kFreeSvTol)) {
        acc += 0.5 * static_cast<double>(y[k]) * grad[k];
        ++free_count;
      }
    }
    if (free_count > 0) {
      sol.bias = acc / static_cast<double>(free_count);
    } else if (s.i != SIZE_MAX && s.j != SIZE_MAX) {
      sol.bias = 0.25 * (s.up + s.down);
    } else {
      sol.bias = 0.0;
    }
  }

  return sol;
}

double recover_bias(const DualSolution& sol, const SymMatrix& k_tr,
                    const std::vector<int>& y, const MarginParams& params) {
  validate_margin(params);
  const std::size_t n = y.size();
  if (sol.alpha.size() != n || k_tr.size() != n) {
    throw DimensionMismatch("recover_bias: sizes disagree");
  }

  // s_i = sum_j alpha_j y_j K_ji
  std::vector<double> weighted(n);
  for (std::size_t j = 0; j < n; ++j) {
    weighted[j] = sol.alpha[j] * static_cast<double>(y[j]);
  }
  std::vector<double> margins(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += weighted[j] * k_tr(i, j);
    margins[i] = acc;
  }

  double acc = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool lower_free = sol.alpha[i] > kFreeSvTol;
    const bool upper_free = !params.bounded() || sol.alpha[i] < params.c - kFreeSvTol;
    if (lower_free && upper_free) {
      acc += static_cast<double>(y[i]) * (1.0 - params.tau * sol.alpha[i]) - margins[i];
      ++free_count;
    }
  }
  if (free_count > 0) return acc / static_cast<double>(free_count);

  // Fallback: the bound constraints confine the bias to an interval; use
  // its midpoint. The interval ends are the movable-direction extremes of
  // y_i (1 - tau alpha_i) - s_i.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double b_i =
        static_cast<double>(y[i]) * (1.0 - params.tau * sol.alpha[i]) - margins[i];
    const bool can_inc = sol.alpha[i] < params.c;
    const bool can_dec = sol.alpha[i] > 0.0;
    if ((y[i] > 0 && can_inc) || (y[i] < 0 && can_dec)) lo = std::max(lo, b_i);
    if ((y[i] < 0 && can_inc) || (y[i] > 0 && can_dec)) hi = std::min(hi, b_i);
  }
  if (!std::isfinite(lo) && !std::isfinite(hi)) throw NoFreeSupportVector();
  if (!std::isfinite(lo)) return hi;
  if (!std::isfinite(hi)) return lo;
  return 0.5 * (lo + hi);
}

std::vector<double> decision_values(const DualSolution& sol, const std::vector<int>& y,
                                    const Matrix& k_cross) {
  const std::size_t n = y.size();
  if (sol.alpha.size() != n || k_cross.rows() != n) {
    throw DimensionMismatch("decision_values: sizes disagree");
  }
  std::vector<double> f(k_cross.cols(), sol.bias);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = sol.alpha[i] * static_cast<double>(y[i]);
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < k_cross.cols(); ++j) f[j] += w * k_cross(i, j);
  }
  return f;
}

double check_kkt(const DualSolution& sol, const SymMatrix& g, const std::vector<int>& y,
                 const MarginParams& params) {
  // Unlike the solver, accepts C = 0: a collapsed box has no movable
  // directions, so the residual is 0 at alpha = 0.
  if (!(params.c >= 0.0) || !(params.tau >= 0.0)) {
    throw BadConfig("check_kkt: C and tau must be nonnegative");
  }
  const std::size_t n = y.size();
  if (sol.alpha.size() != n || g.size() != n) {
    throw DimensionMismatch("check_kkt: sizes disagree");
  }
  std::vector<double> grad = gradient(g, params.tau, sol.alpha);
  return scan_pairs(sol.alpha, grad, y, params.c).residual();
}

}  // namespace kernelforge
