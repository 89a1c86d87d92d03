#include "kernelforge/mkl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "kernelforge/errors.hpp"
#include "kernelforge/linalg.hpp"

namespace kernelforge {

KernelFamily make_family(std::vector<KernelMatrix> candidates, double budget) {
  KernelFamily family;
  family.candidates = std::move(candidates);
  family.budget = budget;
  if (family.candidates.empty()) throw EmptyFamily();
  if (!(budget > 0.0)) throw TraceBudgetNonpositive();
  const std::size_t n = family.candidates.front().entries.size();
  const std::size_t n_tr = family.candidates.front().n_tr;
  family.traces.reserve(family.candidates.size());
  for (const auto& cand : family.candidates) {
    if (cand.entries.size() != n || cand.n_tr != n_tr) {
      throw DimensionMismatch("family candidates disagree on shape");
    }
    const double tr = cand.entries.trace();
    if (!(tr > 0.0)) throw ZeroTrace();
    family.traces.push_back(tr);
  }
  return family;
}

namespace {

constexpr std::size_t kMaxRounds = 500;

SymMatrix train_block(const KernelMatrix& k) {
  SymMatrix t(k.n_tr);
  for (std::size_t i = 0; i < k.n_tr; ++i) {
    for (std::size_t j = 0; j <= i; ++j) t.ref(i, j) = k.entries(i, j);
  }
  return t;
}

// Candidate label grams rescaled so that simplex weights rho sweep exactly
// the budget slice: entry i holds (c / r_i) diag(y) K_i^tr diag(y), hence
// mu_i = c rho_i / r_i and sum_i mu_i r_i = c for any rho with sum rho = 1.
struct ScaledFamily {
  std::vector<SymMatrix> g;
  std::size_t n_tr = 0;
};

ScaledFamily scale_family(const KernelFamily& family, const std::vector<int>& y) {
  if (family.n_tr() == 0) throw EmptyTrainBlock();
  if (y.size() != family.n_tr()) {
    throw DimensionMismatch("label count does not match the training block");
  }
  ScaledFamily sf;
  sf.n_tr = family.n_tr();
  sf.g.reserve(family.m());
  for (std::size_t i = 0; i < family.m(); ++i) {
    SymMatrix g = label_gram(train_block(family.candidates[i]), y);
    g.scale(family.budget / family.traces[i]);
    sf.g.push_back(std::move(g));
  }
  return sf;
}

SymMatrix effective_gram(const ScaledFamily& sf, const std::vector<double>& rho) {
  SymMatrix g(sf.n_tr);
  for (std::size_t i = 0; i < sf.g.size(); ++i) g.add_scaled(sf.g[i], rho[i]);
  return g;
}

// Affine underestimator of the measure recorded at a dual maximizer. The
// feasible set of the inner maximization does not depend on rho, so
// a - rho^T b bounds the measure from below on the whole simplex.
struct Cut {
  double a = 0.0;
  std::vector<double> b;
};

Cut make_cut(const ScaledFamily& sf, const std::vector<double>& alpha, double tau) {
  Cut cut;
  double sum = 0.0;
  double sumsq = 0.0;
  for (double v : alpha) {
    sum += v;
    sumsq += v * v;
  }
  cut.a = 2.0 * sum - tau * sumsq;
  cut.b.reserve(sf.g.size());
  for (const auto& gi : sf.g) cut.b.push_back(gi.quad_form(alpha));
  return cut;
}

double cut_value(const Cut& cut, const std::vector<double>& rho) {
  return cut.a - linalg::dot(cut.b, rho);
}

struct MasterResult {
  std::vector<double> rho;
  double lower = 0.0;  // certified bound on the master optimum
  std::size_t newton = 0;
};

// min theta  s.t.  sum rho = 1, rho >= 0, theta >= a_j - rho^T b_j. Every
// block is 1x1, so this is a linear program ridden through the same
// interior-point path as the full solver; the returned rho is strictly
// positive and ties resolve to the analytic center of the optimal face.
MasterResult solve_master(const std::vector<Cut>& cuts, std::size_t m, double tol) {
  const std::size_t q = m + 1;  // rho, then theta
  SdpProblem lp;
  lp.q = q;
  lp.objective.assign(q, 0.0);
  lp.objective[m] = 1.0;
  lp.eq_a = Matrix(1, q);
  for (std::size_t i = 0; i < m; ++i) lp.eq_a(0, i) = 1.0;
  lp.eq_b = {1.0};
  lp.blocks.reserve(m + cuts.size());
  for (std::size_t i = 0; i < m; ++i) {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(1));
    blk.f[1 + i].ref(0, 0) = -1.0;
    lp.blocks.push_back(std::move(blk));
  }
  for (const auto& cut : cuts) {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(1));
    blk.f[0].ref(0, 0) = cut.a;
    for (std::size_t i = 0; i < m; ++i) blk.f[1 + i].ref(0, 0) = -cut.b[i];
    blk.f[q].ref(0, 0) = -1.0;
    lp.blocks.push_back(std::move(blk));
  }

  std::vector<double> rho0(m, 1.0 / static_cast<double>(m));
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& cut : cuts) worst = std::max(worst, cut_value(cut, rho0));

  SdpOptions opts;
  opts.gap_tol = std::min(1e-9, 0.1 * tol);
  opts.start = std::move(rho0);
  opts.start.push_back(worst + 1.0 + 0.1 * std::abs(worst));
  opts.has_start = true;

  SdpSolution sol = solve_sdp(lp, opts);
  MasterResult out;
  out.rho.assign(sol.u_opt.begin(), sol.u_opt.begin() + static_cast<std::ptrdiff_t>(m));
  out.lower = sol.d_star;
  out.newton = sol.iterations;
  return out;
}

struct CuttingOutcome {
  std::vector<double> rho;
  DualSolution dual;
  double value = 0.0;
  double gap = 0.0;  // value minus the certified lower bound at the stop
  bool degenerate = false;
  std::size_t rounds = 0;
  std::size_t iterations = 0;
};

// Alternates the inner dual maximization with the master over the simplex
// until the best evaluated value meets the master's certified lower bound.
// Inner solves run tighter than the outer tolerance so cut constants do not
// blur the stopping test.
CuttingOutcome run_cutting_plane(const ScaledFamily& sf, const std::vector<int>& y,
                                 const MarginParams& params, double tol) {
  const std::size_t m = sf.g.size();
  const double inner_tol = std::min(1e-9, 0.1 * tol);
  CuttingOutcome out;
  out.rho.assign(m, 1.0 / static_cast<double>(m));
  out.dual = solve_generalized_measure(effective_gram(sf, out.rho), y, params,
                                       inner_tol, 1e-8);
  out.value = out.dual.objective;
  out.gap = out.dual.gap;
  out.iterations = out.dual.iterations;
  if (linalg::norm_inf(out.dual.alpha) == 0.0) {
    // An ascent pair from zero exists whenever both classes are present, so
    // a vanishing maximizer means a collapsed box; keep the uniform weights
    // instead of cutting on a zero gradient.
    out.degenerate = true;
    return out;
  }
  if (m == 1) return out;  // the budget pins the single weight

  std::vector<Cut> cuts;
  cuts.push_back(make_cut(sf, out.dual.alpha, params.tau));
  double lower = -std::numeric_limits<double>::infinity();
  for (std::size_t round = 1; round <= kMaxRounds; ++round) {
    MasterResult master = solve_master(cuts, m, tol);
    lower = std::max(lower, master.lower);
    DualSolution inner = solve_generalized_measure(effective_gram(sf, master.rho), y,
                                                   params, inner_tol, 1e-8);
    out.iterations += inner.iterations + master.newton;
    out.rounds = round;
    cuts.push_back(make_cut(sf, inner.alpha, params.tau));
    if (inner.objective < out.value) {
      out.value = inner.objective;
      out.rho = std::move(master.rho);
      out.dual = std::move(inner);
    }
    out.gap = std::max(0.0, out.value - lower);
    if (out.value <= lower + tol * (1.0 + std::abs(lower))) return out;
  }
  throw NoConvergence("cutting-plane rounds exhausted before the gap closed");
}

std::vector<double> weights_on_slice(const KernelFamily& family,
                                     const std::vector<double>& rho) {
  std::vector<double> mu(family.m());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mu[i] = family.budget * rho[i] / family.traces[i];
  }
  return mu;
}

}  // namespace

KernelMatrix combine_kernels(const KernelFamily& family, const std::vector<double>& mu,
                             double psd_tol) {
  if (mu.size() != family.m()) {
    throw DimensionMismatch("weight count does not match the family size");
  }
  KernelMatrix out;
  out.n_tr = family.n_tr();
  out.entries = SymMatrix(family.n());
  bool negative = false;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out.entries.add_scaled(family.candidates[i].entries, mu[i]);
    negative = negative || mu[i] < 0.0;
  }
  if (negative) {
    EigenDecomposition eig = linalg::eigen_sym(out.entries);
    if (eig.values.front() < -psd_tol * (1.0 + out.entries.max_abs())) {
      throw NonPsdCombination("negative weights push the combination off the psd cone");
    }
  }
  return out;
}

MklSolution solve_mkl_qcqp(const KernelFamily& family, const std::vector<int>& y,
                           const MarginParams& params, double tol) {
  ScaledFamily sf = scale_family(family, y);
  CuttingOutcome outcome = run_cutting_plane(sf, y, params, tol);

  MklSolution sol;
  sol.mode = MklMode::kCuttingPlane;
  sol.degenerate = outcome.degenerate;
  sol.cuts = outcome.rounds;
  sol.iterations = outcome.iterations;
  sol.omega = outcome.value;
  sol.gap = outcome.gap;
  sol.mu = weights_on_slice(family, outcome.rho);
  sol.combined = combine_kernels(family, sol.mu);
  sol.dual = std::move(outcome.dual);
  sol.dual.bias = recover_bias(sol.dual, train_block(sol.combined), y, params);
  return sol;
}

MklSolution tune_tau_qcqp(const KernelFamily& family, const std::vector<int>& y,
                          double c_box, double tol) {
  std::vector<KernelMatrix> extended = family.candidates;
  KernelMatrix ridge;
  ridge.entries = SymMatrix::identity(family.n());
  ridge.n_tr = family.n_tr();
  extended.push_back(std::move(ridge));
  const KernelFamily ext = make_family(std::move(extended), family.budget);

  const bool boxed = c_box != std::numeric_limits<double>::infinity();
  const MarginParams margin = boxed ? MarginParams::soft_l1(c_box) : MarginParams::hard();

  ScaledFamily sf = scale_family(ext, y);
  CuttingOutcome outcome = run_cutting_plane(sf, y, margin, tol);

  MklSolution sol;
  sol.mode = MklMode::kCuttingPlane;
  sol.degenerate = outcome.degenerate;
  sol.cuts = outcome.rounds;
  sol.iterations = outcome.iterations;
  sol.omega = outcome.value;
  sol.gap = outcome.gap;
  // The identity candidate's weight is the ridge; the remaining weights and
  // the combined kernel cover the real candidates only, so the budget splits
  // as sum_i mu_i r_i + tau n = c.
  sol.tau = ext.budget * outcome.rho.back() / ext.traces.back();
  outcome.rho.pop_back();
  sol.mu = weights_on_slice(family, outcome.rho);
  sol.combined = combine_kernels(family, sol.mu);
  sol.dual = std::move(outcome.dual);
  sol.dual.bias = recover_bias(sol.dual, train_block(sol.combined), y,
                               MarginParams::generalized(c_box, sol.tau));
  return sol;
}

MklSolution solve_mkl_sdp(const KernelFamily& family, const std::vector<int>& y,
                          const MarginParams& params, double gap_tol) {
  KernelLearningSdp built = build_kernel_learning_sdp(family, y, params);
  SdpOptions opts;
  opts.gap_tol = gap_tol;
  opts.start = built.start;
  opts.has_start = true;
  SdpSolution sdp = solve_sdp(built.problem, opts);

  MklSolution sol;
  sol.mode = MklMode::kSemidefinite;
  sol.iterations = sdp.iterations;
  sol.omega = sdp.u_opt[built.t_index];
  sol.gap = sdp.gap;
  sol.mu.assign(sdp.u_opt.begin() + static_cast<std::ptrdiff_t>(built.mu_offset),
                sdp.u_opt.begin() + static_cast<std::ptrdiff_t>(built.mu_offset + built.m));
  // The solved combination may ride the psd boundary within the builder
  // jitter, and cancellation between candidates can shrink the combined
  // scale below the jitter's reference scale; allow the extra headroom.
  sol.combined = combine_kernels(family, sol.mu, 1e-6);

  // Lift the training block just enough that the dual solver sees a genuine
  // cone member; the lift stays at the jitter scale, so the multipliers it
  // perturbs stay within the reported gap.
  SymMatrix k_tr = train_block(sol.combined);
  EigenDecomposition eig = linalg::eigen_sym(k_tr);
  if (!eig.values.empty() && eig.values.front() < 0.0) {
    const double lift = -eig.values.front() + 1e-12 * (1.0 + k_tr.max_abs());
    for (std::size_t i = 0; i < k_tr.size(); ++i) k_tr.ref(i, i) += lift;
  }
  sol.dual = solve_generalized_measure(label_gram(k_tr, y), y, params);
  sol.dual.bias = recover_bias(sol.dual, k_tr, y, params);
  return sol;
}

}  // namespace kernelforge
