#include "kernelforge/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "kernelforge/errors.hpp"
#include "kernelforge/kernels.hpp"
#include "kernelforge/linalg.hpp"

namespace kernelforge {
namespace {

constexpr double kWeightCap = 1e17;
constexpr double kNullTol = 1e-11;       // relative eigenvalue cutoff for null spaces
constexpr double kEqResidualTol = 1e-8;  // consistency of A u_p = b
constexpr double kArmijoSlope = 0.01;
constexpr double kBacktrackShrink = 0.5;
// Loosest half squared Newton decrement accepted when line search or the
// step budget runs out. Anything inside the quadratic-convergence region
// keeps the suboptimality bound proportional to dims/weight, so a stall at
// an extreme weight (binding slacks ~1e-8 wide) still certifies the gap.
constexpr double kStallDecrement = 1e-2;
constexpr double kPhase1GapTol = 1e-6;

// Constraint data after equality elimination: min c^T v over
// blocks[b][0] + sum_j v_j blocks[b][j+1] <= 0 in free coordinates v.
struct Reduced {
  std::vector<double> c;
  std::vector<std::vector<SymMatrix>> blocks;

  std::size_t k() const { return c.size(); }
  std::size_t total_dim() const {
    std::size_t d = 0;
    for (const auto& blk : blocks) d += blk.front().size();
    return d;
  }
};

struct BlockFactor {
  Matrix l;
  double logdet = 0.0;  // of the slack, not the factor
};

// Cholesky that reports failure instead of throwing; the line search probes
// infeasible points on purpose.
bool try_cholesky(const SymMatrix& s, Matrix& l, double& logdet) {
  const std::size_t n = s.size();
  const double floor = linalg::kPivotTol * (1.0 + s.max_abs());
  l = Matrix(n, n);
  logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = s(i, j);
      for (std::size_t t = 0; t < j; ++t) acc -= l(i, t) * l(j, t);
      if (i == j) {
        if (!(acc > floor)) return false;
        l(i, i) = std::sqrt(acc);
        logdet += 2.0 * std::log(l(i, i));
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return std::isfinite(logdet);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  }
  return t;
}

double frob_inner(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return acc;
}

SymMatrix slack_at(const std::vector<SymMatrix>& f, const std::vector<double>& v) {
  SymMatrix s = f[0];
  for (std::size_t j = 0; j < v.size(); ++j) s.add_scaled(f[j + 1], v[j]);
  s.scale(-1.0);
  return s;
}

bool factor_point(const Reduced& red, const std::vector<double>& v,
                  std::vector<BlockFactor>& fac) {
  fac.resize(red.blocks.size());
  for (std::size_t b = 0; b < red.blocks.size(); ++b) {
    SymMatrix s = slack_at(red.blocks[b], v);
    if (!try_cholesky(s, fac[b].l, fac[b].logdet)) return false;
  }
  return true;
}

double logdet_total(const std::vector<BlockFactor>& fac) {
  double acc = 0.0;
  for (const auto& bf : fac) acc += bf.logdet;
  return acc;
}

// When centering cannot make progress, look for a certified descent ray:
// a curvature null direction d with c^T d < 0 whose matrix pencil moves
// every block further into the cone. Throws Unbounded when found.
void maybe_throw_unbounded(const Reduced& red,
                           const std::vector<std::vector<Matrix>>& dense,
                           const SymMatrix& h) {
  const std::size_t k = red.k();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (!std::isfinite(h(i, j))) return;
    }
  }
  EigenDecomposition eig;
  try {
    eig = linalg::eigen_sym(h);
  } catch (const SolverError&) {
    return;
  }
  const double lmax = eig.values.back();
  if (eig.values.front() > 1e-10 * (lmax + 1.0)) return;
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = eig.vectors(i, 0);
  double cd = linalg::dot(red.c, d);
  if (cd > 0) {
    for (double& x : d) x = -x;
    cd = -cd;
  }
  if (cd >= -1e-10 * (1.0 + linalg::norm_inf(red.c))) return;
  for (std::size_t b = 0; b < red.blocks.size(); ++b) {
    const std::size_t p = red.blocks[b].front().size();
    Matrix md(p, p, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      if (d[j] == 0.0) continue;
      const auto& fj = dense[b][j];
      for (std::size_t t = 0; t < md.data().size(); ++t) {
        md.data()[t] += d[j] * fj.data()[t];
      }
    }
    SymMatrix ms(p, md.data());
    EigenDecomposition be;
    try {
      be = linalg::eigen_sym(ms);
    } catch (const SolverError&) {
      return;
    }
    if (be.values.back() > 1e-9 * (1.0 + ms.max_abs())) return;
  }
  throw Unbounded("objective decreases without bound along a feasible ray");
}

struct CenterResult {
  bool early = false;
  std::size_t steps = 0;
};

// Newton centering of psi(v) = w c^T v - sum_b logdet(-F_b(v)). Maintains a
// strictly feasible iterate throughout. Exits once the half squared Newton
// decrement is small; anything inside the quadratic-convergence region keeps
// the centered-point suboptimality at the dims/w scale the caller reports.
// The line search scores candidates by the decrement w t c^T delta minus the
// logdet gain, never by subtracting two evaluations of psi: at large weights
// psi itself sits orders of magnitude above the decrements that still
// matter, and the subtraction would drown them in rounding.
CenterResult center(const Reduced& red, const std::vector<std::vector<Matrix>>& dense,
                    double w, std::vector<double>& v, std::vector<BlockFactor>& fac,
                    const SdpOptions& opts, bool has_early, double early_threshold) {
  const std::size_t k = red.k();
  std::vector<Matrix> wmats(k);
  std::vector<double> v2(k);
  std::vector<BlockFactor> fac2;
  std::vector<double> grad;
  SymMatrix h;
  double logdet = logdet_total(fac);
  double lambda2 = std::numeric_limits<double>::infinity();
  CenterResult out;

  for (std::size_t step = 0; step < opts.max_newton; ++step) {
    grad = red.c;
    for (double& g : grad) g *= w;
    h = SymMatrix(k);
    for (std::size_t b = 0; b < red.blocks.size(); ++b) {
      const Matrix& l = fac[b].l;
      const std::size_t p = l.rows();
      for (std::size_t j = 0; j < k; ++j) {
        Matrix x = linalg::forward_subst_multi(l, dense[b][j]);
        wmats[j] = linalg::forward_subst_multi(l, transpose(x));
        for (std::size_t r = 0; r < p; ++r) grad[j] += wmats[j](r, r);
      }
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t <= j; ++t) {
          h.ref(j, t) += frob_inner(wmats[j], wmats[t]);
        }
      }
    }
    for (double g : grad) {
      if (!std::isfinite(g)) throw NoConvergence("non-finite gradient during centering");
    }

    Matrix hl;
    double hld = 0.0;
    bool ok = try_cholesky(h, hl, hld);
    if (!ok) {
      double base = 1.0;
      for (std::size_t i = 0; i < k; ++i) base = std::max(base, h(i, i));
      for (double ridge = 1e-12; !ok && ridge <= 1e-2; ridge *= 100.0) {
        SymMatrix hr = h;
        for (std::size_t i = 0; i < k; ++i) hr.ref(i, i) += ridge * base;
        ok = try_cholesky(hr, hl, hld);
      }
      if (!ok) {
        maybe_throw_unbounded(red, dense, h);
        throw NoConvergence("centering curvature is numerically singular");
      }
    }
    std::vector<double> rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs[i] = -grad[i];
    std::vector<double> delta = linalg::back_subst(hl, linalg::forward_subst(hl, rhs));
    const double slope = linalg::dot(grad, delta);
    if (!std::isfinite(slope)) throw NoConvergence("non-finite step during centering");
    lambda2 = std::max(0.0, -slope);
    if (0.5 * lambda2 <= opts.newton_tol) {
      out.steps = step;
      return out;
    }

    const double cdelta = linalg::dot(red.c, delta);
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      bool moved = false;
      for (std::size_t i = 0; i < k; ++i) {
        v2[i] = v[i] + t * delta[i];
        if (v2[i] != v[i]) moved = true;
      }
      // Once t * delta no longer changes the iterate, further halvings
      // cannot either; bail out so this counts as a stall, not progress.
      if (!moved) break;
      if (factor_point(red, v2, fac2)) {
        const double logdet2 = logdet_total(fac2);
        const double dpsi = w * t * cdelta - (logdet2 - logdet);
        if (std::isfinite(logdet2) && dpsi <= kArmijoSlope * t * slope) {
          v.swap(v2);
          fac.swap(fac2);
          logdet = logdet2;
          accepted = true;
        }
      }
      if (!accepted) t *= kBacktrackShrink;
    }
    out.steps = step + 1;
    if (!accepted) {
      // Armijo decrements near the center can fall below what the factored
      // slacks resolve; a loosely met decrement is still an acceptable center.
      if (0.5 * lambda2 <= kStallDecrement) return out;
      maybe_throw_unbounded(red, dense, h);
      throw NoConvergence("centering stalled before reaching tolerance");
    }
    if (has_early && v.back() <= early_threshold) {
      out.early = true;
      return out;
    }
  }
  if (0.5 * lambda2 <= kStallDecrement) return out;
  maybe_throw_unbounded(red, dense, h);
  throw NoConvergence("centering did not converge within the iteration budget");
}

struct DriveResult {
  double w = 0.0;
  std::size_t newton = 0;
  bool early = false;
};

// Outer barrier loop: center, report, tighten. A centered point at weight w
// sits within dims/w of the optimum, so the dual value reported at each
// outer iteration is p - dims/w.
DriveResult drive(const Reduced& red, const std::vector<std::vector<Matrix>>& dense,
                  std::vector<double>& v, std::vector<BlockFactor>& fac,
                  const SdpOptions& opts, double const_obj, double gap_tol,
                  std::vector<SdpIterate>* trace, bool has_early,
                  double early_threshold) {
  const double dims = static_cast<double>(red.total_dim());
  DriveResult dr;
  double w = opts.initial_weight;
  while (true) {
    CenterResult cr =
        center(red, dense, w, v, fac, opts, has_early, early_threshold);
    dr.newton += cr.steps;
    if (cr.early || (has_early && v.back() <= early_threshold)) {
      dr.early = true;
      dr.w = w;
      return dr;
    }
    const double p = const_obj + linalg::dot(red.c, v);
    const double d = p - dims / w;
    if (trace) trace->push_back({w, p, d});
    if (p - d <= gap_tol * (1.0 + std::abs(p))) {
      dr.w = w;
      return dr;
    }
    if (w > kWeightCap / opts.weight_growth) {
      throw NoConvergence("barrier weight cap reached before gap closed");
    }
    w *= opts.weight_growth;
  }
}

void validate_problem(const SdpProblem& p) {
  if (p.objective.size() != p.q) {
    throw BadConfig("objective length must match the variable count");
  }
  if (p.blocks.empty()) throw BadConfig("at least one constraint block is required");
  for (const auto& blk : p.blocks) {
    if (blk.f.size() != p.q + 1) {
      throw BadConfig("each block needs one matrix per variable plus the constant");
    }
    const std::size_t d = blk.f.front().size();
    if (d == 0) throw BadConfig("constraint blocks must have positive dimension");
    for (const auto& m : blk.f) {
      if (m.size() != d) throw DimensionMismatch("block coefficient sizes differ");
    }
  }
  const std::size_t r = p.eq_b.size();
  if (r > 0 && (p.eq_a.rows() != r || p.eq_a.cols() != p.q)) {
    throw DimensionMismatch("equality system shape mismatch");
  }
  if (r == 0 && p.eq_a.rows() != 0) {
    throw DimensionMismatch("equality rows without right-hand sides");
  }
}

struct Reduction {
  std::vector<double> u_p;
  Matrix basis;  // q x k null-space basis; unused when identity_basis
  bool identity_basis = false;
  double const_obj = 0.0;
  Reduced red;
};

Reduction reduce(const SdpProblem& p) {
  const std::size_t q = p.q;
  const std::size_t r = p.eq_b.size();
  Reduction out;
  out.u_p.assign(q, 0.0);
  if (r == 0) {
    out.identity_basis = true;
    out.red.c = p.objective;
    out.red.blocks.reserve(p.blocks.size());
    for (const auto& blk : p.blocks) out.red.blocks.push_back(blk.f);
    return out;
  }

  const Matrix& a = p.eq_a;
  SymMatrix ata(q);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < r; ++t) acc += a(t, i) * a(t, j);
      ata.ref(i, j) = acc;
    }
  }
  EigenDecomposition null_eig =
      q > 0 ? linalg::eigen_sym(ata) : EigenDecomposition{};
  const double ata_max = q > 0 ? std::max(0.0, null_eig.values.back()) : 0.0;
  const double null_thr = ata_max * kNullTol + 1e-300;
  std::vector<std::size_t> null_cols;
  for (std::size_t i = 0; i < q; ++i) {
    if (null_eig.values[i] <= null_thr) null_cols.push_back(i);
  }

  SymMatrix aat(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < q; ++t) acc += a(i, t) * a(j, t);
      aat.ref(i, j) = acc;
    }
  }
  EigenDecomposition row_eig = linalg::eigen_sym(aat);
  const double aat_max = std::max(0.0, row_eig.values.back());
  const double row_thr = aat_max * kNullTol + 1e-300;
  std::vector<double> yv(r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    if (row_eig.values[i] <= row_thr) continue;
    double coef = 0.0;
    for (std::size_t t = 0; t < r; ++t) coef += row_eig.vectors(t, i) * p.eq_b[t];
    coef /= row_eig.values[i];
    for (std::size_t t = 0; t < r; ++t) yv[t] += coef * row_eig.vectors(t, i);
  }
  for (std::size_t j = 0; j < q; ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t < r; ++t) acc += a(t, j) * yv[t];
    out.u_p[j] = acc;
  }
  double res = 0.0;
  for (std::size_t t = 0; t < r; ++t) {
    double row = -p.eq_b[t];
    for (std::size_t j = 0; j < q; ++j) row += a(t, j) * out.u_p[j];
    res = std::max(res, std::abs(row));
  }
  if (res > kEqResidualTol * (1.0 + linalg::norm_inf(p.eq_b))) {
    throw Infeasible("equality constraints are inconsistent");
  }

  const std::size_t k = null_cols.size();
  out.basis = Matrix(q, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < q; ++i) out.basis(i, j) = null_eig.vectors(i, null_cols[j]);
  }
  out.const_obj = linalg::dot(p.objective, out.u_p);
  out.red.c.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i) acc += out.basis(i, j) * p.objective[i];
    out.red.c[j] = acc;
  }
  out.red.blocks.reserve(p.blocks.size());
  for (const auto& blk : p.blocks) {
    const std::size_t d = blk.f.front().size();
    std::vector<SymMatrix> tf;
    tf.reserve(k + 1);
    SymMatrix f0 = blk.f[0];
    for (std::size_t i = 0; i < q; ++i) {
      if (out.u_p[i] != 0.0) f0.add_scaled(blk.f[i + 1], out.u_p[i]);
    }
    tf.push_back(std::move(f0));
    for (std::size_t j = 0; j < k; ++j) {
      SymMatrix fj(d);
      for (std::size_t i = 0; i < q; ++i) {
        const double w = out.basis(i, j);
        if (w != 0.0) fj.add_scaled(blk.f[i + 1], w);
      }
      tf.push_back(std::move(fj));
    }
    out.red.blocks.push_back(std::move(tf));
  }
  return out;
}

std::vector<std::vector<Matrix>> dense_tables(const Reduced& red) {
  std::vector<std::vector<Matrix>> dense(red.blocks.size());
  for (std::size_t b = 0; b < red.blocks.size(); ++b) {
    dense[b].reserve(red.k());
    for (std::size_t j = 0; j < red.k(); ++j) {
      dense[b].push_back(red.blocks[b][j + 1].to_dense());
    }
  }
  return dense;
}

// Finds a strictly feasible v by minimizing the cone violation s in
// F(v) - s I <= 0, stopping as soon as s clears a small negative margin.
// Blocks whose reduced coefficients all vanish do not depend on v; they are
// checked spectrally once and kept out of the search, because coupling s
// into a constant block whose slack is already hair-thin (a pinned jittered
// candidate, say) would force the barrier weight through the roof.
std::vector<double> phase_one(const Reduced& red, const SdpOptions& opts,
                              std::size_t& newton_total) {
  const std::size_t k = red.k();
  Reduced aux;
  aux.c.assign(k + 1, 0.0);
  aux.c.back() = 1.0;
  double f0_scale = 0.0;
  aux.blocks.reserve(red.blocks.size());
  for (const auto& blk : red.blocks) {
    bool constant = true;
    for (std::size_t j = 1; j < blk.size() && constant; ++j) {
      constant = blk[j].max_abs() == 0.0;
    }
    if (constant) {
      EigenDecomposition eig = linalg::eigen_sym(blk.front());
      if (eig.values.back() > -1e-12 * (1.0 + blk.front().max_abs())) {
        throw Infeasible("no strictly feasible point within tolerance");
      }
      continue;
    }
    const std::size_t d = blk.front().size();
    std::vector<SymMatrix> f = blk;
    f.push_back(SymMatrix::identity(d, -1.0));
    aux.blocks.push_back(std::move(f));
    f0_scale = std::max(f0_scale, blk.front().max_abs());
  }
  if (aux.blocks.empty()) return std::vector<double>(k, 0.0);
  double s0 = 0.0;
  for (const auto& blk : aux.blocks) {
    EigenDecomposition eig = linalg::eigen_sym(blk.front());
    s0 = std::max(s0, eig.values.back());
  }
  s0 += 1.0;
  std::vector<double> v(k + 1, 0.0);
  v.back() = s0;
  std::vector<BlockFactor> fac;
  if (!factor_point(aux, v, fac)) {
    throw NoConvergence("failed to start the feasibility search");
  }
  const double margin = 1e-9 * (1.0 + f0_scale);
  SdpOptions aux_opts = opts;
  aux_opts.initial_weight = 1.0;
  std::vector<std::vector<Matrix>> dense = dense_tables(aux);
  DriveResult dr = drive(aux, dense, v, fac, aux_opts, 0.0, kPhase1GapTol,
                         nullptr, true, -margin);
  newton_total += dr.newton;
  if (!dr.early) {
    throw Infeasible("no strictly feasible point within tolerance");
  }
  v.pop_back();
  return v;
}

void require_labels(const std::vector<int>& y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw LabelOutOfRange("labels must be +1 or -1");
  }
  if (!pos || !neg) throw SingleClassLabels();
}

void validate_family_shapes(const KernelFamily& family) {
  if (family.candidates.empty()) throw EmptyFamily();
  if (family.traces.size() != family.candidates.size()) {
    throw DimensionMismatch("family traces out of sync with candidates");
  }
  if (!(family.budget > 0.0)) {
    throw TraceBudgetNonpositive();
  }
  const std::size_t n = family.candidates.front().entries.size();
  const std::size_t n_tr = family.candidates.front().n_tr;
  if (n_tr == 0) throw EmptyTrainBlock();
  for (const auto& cand : family.candidates) {
    if (cand.entries.size() != n || cand.n_tr != n_tr) {
      throw DimensionMismatch("family candidates disagree on shape");
    }
  }
  for (double r : family.traces) {
    if (!(r > 0.0)) throw ZeroTrace();
  }
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts) {
  validate_problem(p);
  if (opts.has_start && opts.start.size() != p.q) {
    throw BadConfig("start vector length must match the variable count");
  }
  Reduction rd = reduce(p);
  const std::size_t k = rd.red.k();
  SdpSolution sol;

  if (k == 0) {
    // Equalities pin every variable: verify the constant blocks and return.
    for (const auto& blk : rd.red.blocks) {
      EigenDecomposition eig = linalg::eigen_sym(blk.front());
      if (eig.values.back() > 1e-9 * (1.0 + blk.front().max_abs())) {
        throw Infeasible("constraints exclude the unique equality solution");
      }
    }
    sol.u_opt = rd.u_p;
    for (const auto& blk : rd.red.blocks) {
      sol.z_opt.emplace_back(blk.front().size());
    }
    sol.p_star = sol.d_star = rd.const_obj;
    sol.gap = 0.0;
    return sol;
  }

  std::vector<std::vector<Matrix>> dense = dense_tables(rd.red);
  std::size_t newton_total = 0;

  std::vector<double> v(k, 0.0);
  std::vector<BlockFactor> fac;
  bool started = false;
  if (opts.has_start) {
    if (rd.identity_basis) {
      v = opts.start;
    } else {
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.q; ++i) {
          acc += rd.basis(i, j) * (opts.start[i] - rd.u_p[i]);
        }
        v[j] = acc;
      }
    }
    started = factor_point(rd.red, v, fac);
  }
  if (!started) {
    v = phase_one(rd.red, opts, newton_total);
    if (!factor_point(rd.red, v, fac)) {
      throw Infeasible("feasibility search ended on the constraint boundary");
    }
  }

  DriveResult dr = drive(rd.red, dense, v, fac, opts, rd.const_obj, opts.gap_tol,
                         &sol.trace, false, 0.0);
  newton_total += dr.newton;

  const double dims = static_cast<double>(rd.red.total_dim());
  sol.p_star = rd.const_obj + linalg::dot(rd.red.c, v);
  sol.d_star = sol.p_star - dims / dr.w;
  sol.gap = sol.p_star - sol.d_star;
  sol.iterations = newton_total;

  sol.u_opt.assign(p.q, 0.0);
  if (rd.identity_basis) {
    sol.u_opt = v;
  } else {
    sol.u_opt = rd.u_p;
    for (std::size_t i = 0; i < p.q; ++i) {
      for (std::size_t j = 0; j < k; ++j) sol.u_opt[i] += rd.basis(i, j) * v[j];
    }
  }
  sol.z_opt.reserve(fac.size());
  for (const auto& bf : fac) {
    const std::size_t d = bf.l.rows();
    Matrix inv(d, d);
    std::vector<double> e(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      std::fill(e.begin(), e.end(), 0.0);
      e[c] = 1.0;
      std::vector<double> col = linalg::back_subst(bf.l, linalg::forward_subst(bf.l, e));
      for (std::size_t r = 0; r < d; ++r) inv(r, c) = col[r];
    }
    SymMatrix z(d, inv.data());
    z.scale(1.0 / dr.w);
    sol.z_opt.push_back(std::move(z));
  }
  return sol;
}

SdpProblem sdp_dual(const SdpProblem& p) {
  validate_problem(p);
  if (p.blocks.size() != 1 || !p.eq_b.empty()) {
    throw BadConfig("dual construction expects a single block and no equalities");
  }
  const auto& f = p.blocks.front().f;
  const std::size_t d = f.front().size();
  const std::size_t qz = d * (d + 1) / 2;
  auto pos = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };

  SdpProblem out;
  out.q = qz;
  out.objective.assign(qz, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      out.objective[pos(i, j)] = -(i == j ? f[0](i, i) : 2.0 * f[0](i, j));
    }
  }
  LmiBlock blk;
  blk.f.assign(qz + 1, SymMatrix(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      blk.f[1 + pos(i, j)].ref(i, j) = -1.0;
    }
  }
  out.blocks.push_back(std::move(blk));
  out.eq_a = Matrix(p.q, qz);
  out.eq_b.assign(p.q, 0.0);
  for (std::size_t kvar = 0; kvar < p.q; ++kvar) {
    const SymMatrix& fk = f[kvar + 1];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        out.eq_a(kvar, pos(i, j)) = (i == j) ? fk(i, i) : 2.0 * fk(i, j);
      }
    }
    out.eq_b[kvar] = -p.objective[kvar];
  }
  return out;
}

KernelLearningSdp build_kernel_learning_sdp(const KernelFamily& family,
                                            const std::vector<int>& y,
                                            const MarginParams& params,
                                            double jitter) {
  validate_family_shapes(family);
  const std::size_t m = family.m();
  const std::size_t n = family.n();
  const std::size_t n_tr = family.n_tr();
  if (y.size() != n_tr) throw DimensionMismatch("label count must match the training block");
  require_labels(y);
  if (!(params.tau >= 0.0) || !(params.c > 0.0)) {
    throw BadConfig("margin parameters out of range");
  }
  if (!(jitter >= 0.0)) throw BadConfig("jitter must be nonnegative");
  const bool boxed = params.bounded();

  std::vector<SymMatrix> gmats;
  gmats.reserve(m);
  double combo_scale = 0.0;
  double schur_scale = 0.0;
  for (const auto& cand : family.candidates) {
    KernelBlocks blocks = partition_blocks(cand);
    gmats.push_back(label_gram(blocks.train, y));
    combo_scale = std::max(combo_scale, cand.entries.max_abs());
    schur_scale = std::max(schur_scale, gmats.back().max_abs());
  }
  const double jit1 = jitter * (1.0 + combo_scale);
  const double jit2 =
      jitter * (1.0 + schur_scale + params.tau + (boxed ? 2.0 * params.c : 0.0));

  KernelLearningSdp out;
  out.m = m;
  out.mu_offset = 0;
  out.nu_offset = m;
  out.delta_offset = boxed ? m + n_tr : SIZE_MAX;
  out.lambda_index = m + n_tr + (boxed ? n_tr : 0);
  out.t_index = out.lambda_index + 1;
  const std::size_t q = out.t_index + 1;

  SdpProblem& prob = out.problem;
  prob.q = q;
  prob.objective.assign(q, 0.0);
  prob.objective[out.t_index] = 1.0;

  // Combination cone: sum_i mu_i K_i (+ jitter) psd over all points.
  {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n));
    blk.f[0] = SymMatrix::identity(n, -jit1);
    for (std::size_t i = 0; i < m; ++i) {
      SymMatrix neg = family.candidates[i].entries;
      neg.scale(-1.0);
      blk.f[1 + out.mu_offset + i] = std::move(neg);
    }
    prob.blocks.push_back(std::move(blk));
  }
  // Schur epigraph block over the training points plus one corner row.
  {
    const std::size_t d = n_tr + 1;
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(d));
    SymMatrix f0(d);
    for (std::size_t j = 0; j < n_tr; ++j) {
      f0.ref(j, j) = -(params.tau + jit2);
      f0.ref(n_tr, j) = -1.0;
    }
    f0.ref(n_tr, n_tr) = -jit2;
    blk.f[0] = std::move(f0);
    for (std::size_t i = 0; i < m; ++i) {
      SymMatrix fi(d);
      for (std::size_t r = 0; r < n_tr; ++r) {
        for (std::size_t c = 0; c <= r; ++c) fi.ref(r, c) = -gmats[i](r, c);
      }
      blk.f[1 + out.mu_offset + i] = std::move(fi);
    }
    for (std::size_t j = 0; j < n_tr; ++j) {
      blk.f[1 + out.nu_offset + j].ref(n_tr, j) = -1.0;
      if (boxed) {
        blk.f[1 + out.delta_offset + j].ref(n_tr, j) = 1.0;
        blk.f[1 + out.delta_offset + j].ref(n_tr, n_tr) = 2.0 * params.c;
      }
    }
    for (std::size_t j = 0; j < n_tr; ++j) {
      blk.f[1 + out.lambda_index].ref(n_tr, j) = -static_cast<double>(y[j]);
    }
    blk.f[1 + out.t_index].ref(n_tr, n_tr) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }
  // nu >= 0 and, for boxed margins, delta >= 0.
  {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n_tr));
    for (std::size_t j = 0; j < n_tr; ++j) blk.f[1 + out.nu_offset + j].ref(j, j) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }
  if (boxed) {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n_tr));
    for (std::size_t j = 0; j < n_tr; ++j) blk.f[1 + out.delta_offset + j].ref(j, j) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }

  prob.eq_a = Matrix(1, q);
  for (std::size_t i = 0; i < m; ++i) prob.eq_a(0, out.mu_offset + i) = family.traces[i];
  prob.eq_b = {family.budget};

  out.start.assign(q, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    out.start[out.mu_offset + i] = family.budget / (static_cast<double>(m) * family.traces[i]);
  }
  for (std::size_t j = 0; j < n_tr; ++j) {
    out.start[out.nu_offset + j] = 1.0;
    if (boxed) out.start[out.delta_offset + j] = 1.0;
  }
  SymMatrix a_mat(n_tr);
  for (std::size_t i = 0; i < m; ++i) a_mat.add_scaled(gmats[i], out.start[out.mu_offset + i]);
  for (std::size_t j = 0; j < n_tr; ++j) a_mat.ref(j, j) += params.tau + jit2;
  std::vector<double> wvec(n_tr, boxed ? 1.0 : 2.0);
  std::vector<double> z = linalg::solve_spd(a_mat, wvec);
  const double quad = linalg::dot(wvec, z);
  out.start[out.t_index] =
      quad + 1.0 + (boxed ? 2.0 * params.c * static_cast<double>(n_tr) : 0.0);
  return out;
}

KernelLearningSdp build_tau_tuning_sdp(const KernelFamily& family,
                                       const std::vector<int>& y, double c_box,
                                       double jitter) {
  validate_family_shapes(family);
  const std::size_t m = family.m();
  const std::size_t n = family.n();
  const std::size_t n_tr = family.n_tr();
  if (y.size() != n_tr) throw DimensionMismatch("label count must match the training block");
  require_labels(y);
  if (!(c_box > 0.0)) throw BadConfig("box bound must be positive");
  if (!(jitter >= 0.0)) throw BadConfig("jitter must be nonnegative");
  const bool boxed = c_box != std::numeric_limits<double>::infinity();

  std::vector<SymMatrix> gmats;
  gmats.reserve(m);
  double combo_scale = 0.0;
  double schur_scale = 0.0;
  for (const auto& cand : family.candidates) {
    KernelBlocks blocks = partition_blocks(cand);
    gmats.push_back(label_gram(blocks.train, y));
    combo_scale = std::max(combo_scale, cand.entries.max_abs());
    schur_scale = std::max(schur_scale, gmats.back().max_abs());
  }
  const double jit1 = jitter * (1.0 + combo_scale);
  const double jit2 = jitter * (1.0 + schur_scale + (boxed ? 2.0 * c_box : 0.0));

  KernelLearningSdp out;
  out.m = m;
  out.mu_offset = 0;
  out.tau_index = m;
  out.nu_offset = m + 1;
  out.delta_offset = boxed ? m + 1 + n_tr : SIZE_MAX;
  out.lambda_index = m + 1 + n_tr + (boxed ? n_tr : 0);
  out.t_index = out.lambda_index + 1;
  const std::size_t q = out.t_index + 1;

  SdpProblem& prob = out.problem;
  prob.q = q;
  prob.objective.assign(q, 0.0);
  prob.objective[out.t_index] = 1.0;

  {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n));
    blk.f[0] = SymMatrix::identity(n, -jit1);
    for (std::size_t i = 0; i < m; ++i) {
      SymMatrix neg = family.candidates[i].entries;
      neg.scale(-1.0);
      blk.f[1 + out.mu_offset + i] = std::move(neg);
    }
    prob.blocks.push_back(std::move(blk));
  }
  {
    const std::size_t d = n_tr + 1;
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(d));
    SymMatrix f0(d);
    for (std::size_t j = 0; j < n_tr; ++j) {
      f0.ref(j, j) = -jit2;
      f0.ref(n_tr, j) = -1.0;
    }
    f0.ref(n_tr, n_tr) = -jit2;
    blk.f[0] = std::move(f0);
    for (std::size_t i = 0; i < m; ++i) {
      SymMatrix fi(d);
      for (std::size_t r = 0; r < n_tr; ++r) {
        for (std::size_t c = 0; c <= r; ++c) fi.ref(r, c) = -gmats[i](r, c);
      }
      blk.f[1 + out.mu_offset + i] = std::move(fi);
    }
    for (std::size_t j = 0; j < n_tr; ++j) {
      blk.f[1 + out.tau_index].ref(j, j) = -1.0;
      blk.f[1 + out.nu_offset + j].ref(n_tr, j) = -1.0;
      if (boxed) {
        blk.f[1 + out.delta_offset + j].ref(n_tr, j) = 1.0;
        blk.f[1 + out.delta_offset + j].ref(n_tr, n_tr) = 2.0 * c_box;
      }
      blk.f[1 + out.lambda_index].ref(n_tr, j) = -static_cast<double>(y[j]);
    }
    blk.f[1 + out.t_index].ref(n_tr, n_tr) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }
  {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n_tr));
    for (std::size_t j = 0; j < n_tr; ++j) blk.f[1 + out.nu_offset + j].ref(j, j) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }
  if (boxed) {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(n_tr));
    for (std::size_t j = 0; j < n_tr; ++j) blk.f[1 + out.delta_offset + j].ref(j, j) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }
  {
    LmiBlock blk;
    blk.f.assign(q + 1, SymMatrix(1));
    blk.f[1 + out.tau_index].ref(0, 0) = -1.0;
    prob.blocks.push_back(std::move(blk));
  }

  prob.eq_a = Matrix(1, q);
  for (std::size_t i = 0; i < m; ++i) prob.eq_a(0, out.mu_offset + i) = family.traces[i];
  prob.eq_a(0, out.tau_index) = static_cast<double>(n);
  prob.eq_b = {family.budget};

  out.start.assign(q, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    out.start[out.mu_offset + i] =
        family.budget / (2.0 * static_cast<double>(m) * family.traces[i]);
  }
  out.start[out.tau_index] = family.budget / (2.0 * static_cast<double>(n));
  for (std::size_t j = 0; j < n_tr; ++j) {
    out.start[out.nu_offset + j] = 1.0;
    if (boxed) out.start[out.delta_offset + j] = 1.0;
  }
  SymMatrix a_mat(n_tr);
  for (std::size_t i = 0; i < m; ++i) a_mat.add_scaled(gmats[i], out.start[out.mu_offset + i]);
  for (std::size_t j = 0; j < n_tr; ++j) {
    a_mat.ref(j, j) += out.start[out.tau_index] + jit2;
  }
  std::vector<double> wvec(n_tr, boxed ? 1.0 : 2.0);
  std::vector<double> z = linalg::solve_spd(a_mat, wvec);
  const double quad = linalg::dot(wvec, z);
  out.start[out.t_index] =
      quad + 1.0 + (boxed ? 2.0 * c_box * static_cast<double>(n_tr) : 0.0);
  return out;
}

}  // namespace kernelforge
