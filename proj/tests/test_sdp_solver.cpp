#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "kernelforge/errors.hpp"
#include "kernelforge/kernels.hpp"
#include "kernelforge/linalg.hpp"
#include "kernelforge/mkl_types.hpp"
#include "kernelforge/qp_dual.hpp"
#include "kernelforge/sdp.hpp"
#include "support/generators.hpp"

using namespace kernelforge;
using namespace testsupport;

namespace {

// min u such that f0 - u I <= 0, whose optimum is the top eigenvalue.
SdpProblem top_eigenvalue_problem(const SymMatrix& f0) {
  SdpProblem p;
  p.q = 1;
  p.objective = {1.0};
  LmiBlock blk;
  blk.f.push_back(f0);
  blk.f.push_back(SymMatrix::identity(f0.size(), -1.0));
  p.blocks.push_back(blk);
  return p;
}

double min_eigenvalue(const SymMatrix& s) {
  return linalg::eigen_sym(s).values.front();
}

}  // namespace

TEST_CASE("top-eigenvalue program recovers the spectral bound with a dual certificate") {
  auto p = top_eigenvalue_problem(SymMatrix::from_rows({{1, 0}, {0, 2}}));
  SdpSolution sol = solve_sdp(p);
  CHECK(sol.u_opt[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.p_star == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.d_star == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.gap >= -1e-9);
  CHECK(sol.gap <= 1e-6 * (1.0 + std::abs(sol.p_star)));
  REQUIRE(sol.z_opt.size() == 1);
  // Stationarity pins trace(Z) = 1; the mass concentrates on the top eigenvector.
  CHECK(sol.z_opt[0].trace() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.z_opt[0](1, 1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(min_eigenvalue(sol.z_opt[0]) >= -1e-8);
}

TEST_CASE("equalities that pin every variable reduce to a feasibility check") {
  SdpProblem p;
  p.q = 1;
  p.objective = {1.0};
  LmiBlock blk;
  blk.f.push_back(SymMatrix::from_rows({{-5}}));
  blk.f.push_back(SymMatrix::from_rows({{1}}));
  p.blocks.push_back(blk);
  p.eq_a = Matrix(1, 1);
  p.eq_a(0, 0) = 1.0;
  p.eq_b = {5.0};
  SdpSolution sol = solve_sdp(p);
  CHECK(sol.u_opt[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(sol.p_star == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(sol.gap == 0.0);
  CHECK(sol.iterations == 0);

  p.eq_b = {6.0};  // now the pinned point violates u <= 5
  CHECK_THROWS_AS(solve_sdp(p), Infeasible);
}

TEST_CASE("separable two-variable program meets both scalar bounds") {
  SdpProblem p;
  p.q = 2;
  p.objective = {1.0, 1.0};
  LmiBlock blk;
  blk.f.push_back(SymMatrix::from_rows({{1, 0}, {0, 1}}));
  blk.f.push_back(SymMatrix::from_rows({{-1, 0}, {0, 0}}));
  blk.f.push_back(SymMatrix::from_rows({{0, 0}, {0, -1}}));
  p.blocks.push_back(blk);
  SdpSolution sol = solve_sdp(p);
  CHECK(sol.p_star == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.u_opt[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sol.u_opt[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("zero constant block drives the objective to zero") {
  auto p = top_eigenvalue_problem(SymMatrix(2));
  SdpSolution sol = solve_sdp(p);
  CHECK(std::abs(sol.p_star) <= 1e-5);
  CHECK(std::abs(sol.d_star) <= 1e-5);
  CHECK(sol.gap >= -1e-9);
}

TEST_CASE("scalar bound and its dual agree up to the sign convention") {
  SdpProblem p;
  p.q = 1;
  p.objective = {1.0};
  LmiBlock blk;
  blk.f.push_back(SymMatrix::from_rows({{1}}));
  blk.f.push_back(SymMatrix::from_rows({{-1}}));
  p.blocks.push_back(blk);
  SdpSolution primal = solve_sdp(p);
  CHECK(primal.p_star == doctest::Approx(1.0).epsilon(1e-6));

  SdpProblem d = sdp_dual(p);
  CHECK(d.q == 1);
  SdpSolution dual = solve_sdp(d);
  CHECK(dual.p_star == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(dual.u_opt[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("dual of the top-eigenvalue program concentrates on the top eigenvector") {
  auto p = top_eigenvalue_problem(SymMatrix::from_rows({{1, 0}, {0, 2}}));
  SdpProblem d = sdp_dual(p);
  CHECK(d.q == 3);
  CHECK(d.eq_b.size() == 1);
  SdpSolution sol = solve_sdp(d);
  CHECK(sol.p_star == doctest::Approx(-2.0).epsilon(1e-5));
  // Packed lower-triangle order: z00, z10, z11.
  CHECK(std::abs(sol.u_opt[0]) <= 1e-4);
  CHECK(std::abs(sol.u_opt[1]) <= 1e-4);
  CHECK(sol.u_opt[2] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("constant objective over an equality segment lands at the analytic center") {
  SdpProblem p;
  p.q = 2;
  p.objective = {1.0, 1.0};
  LmiBlock blk;
  blk.f.push_back(SymMatrix::from_rows({{1, 0}, {0, 1}}));
  blk.f.push_back(SymMatrix::from_rows({{-1, 0}, {0, 0}}));
  blk.f.push_back(SymMatrix::from_rows({{0, 0}, {0, -1}}));
  p.blocks.push_back(blk);
  p.eq_a = Matrix(1, 2);
  p.eq_a(0, 0) = 1.0;
  p.eq_a(0, 1) = 1.0;
  p.eq_b = {3.0};
  SdpSolution sol = solve_sdp(p);
  CHECK(sol.p_star == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(sol.u_opt[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(sol.u_opt[1] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("boundary-only feasible sets and inconsistent equalities report infeasibility") {
  SdpProblem p;
  p.q = 1;
  p.objective = {1.0};
  LmiBlock blk;
  // u <= 1 and u >= 1 leave no interior.
  blk.f.push_back(SymMatrix::from_rows({{-1, 0}, {0, 1}}));
  blk.f.push_back(SymMatrix::from_rows({{1, 0}, {0, -1}}));
  p.blocks.push_back(blk);
  CHECK_THROWS_AS(solve_sdp(p), Infeasible);

  // u <= -1 and u >= 0 is empty outright.
  SdpProblem p2 = p;
  p2.blocks[0].f[0] = SymMatrix::from_rows({{1, 0}, {0, 0}});
  p2.blocks[0].f[1] = SymMatrix::from_rows({{1, 0}, {0, -1}});
  CHECK_THROWS_AS(solve_sdp(p2), Infeasible);

  SdpProblem p3 = top_eigenvalue_problem(SymMatrix::from_rows({{1}}));
  p3.eq_a = Matrix(2, 1);
  p3.eq_a(0, 0) = 1.0;
  p3.eq_a(1, 0) = 1.0;
  p3.eq_b = {0.0, 1.0};
  CHECK_THROWS_AS(solve_sdp(p3), Infeasible);
}

TEST_CASE("a certified descent ray raises the unbounded error") {
  SdpProblem p;
  p.q = 1;
  p.objective = {-1.0};
  LmiBlock blk;
  blk.f.push_back(SymMatrix::from_rows({{0}}));
  blk.f.push_back(SymMatrix::from_rows({{-1}}));
  p.blocks.push_back(blk);
  CHECK_THROWS_AS(solve_sdp(p), Unbounded);
}

TEST_CASE("malformed problems are rejected before any factorization") {
  SdpProblem p;
  p.q = 2;
  p.objective = {1.0};  // wrong length
  LmiBlock blk;
  blk.f.assign(3, SymMatrix(2));
  p.blocks.push_back(blk);
  CHECK_THROWS_AS(solve_sdp(p), BadConfig);

  p.objective = {1.0, 0.0};
  p.blocks[0].f.pop_back();
  CHECK_THROWS_AS(solve_sdp(p), BadConfig);

  p.blocks[0].f.push_back(SymMatrix(3));  // ragged dimensions
  CHECK_THROWS_AS(solve_sdp(p), DimensionMismatch);

  p.blocks.clear();
  CHECK_THROWS_AS(solve_sdp(p), BadConfig);

  auto ok = top_eigenvalue_problem(SymMatrix::from_rows({{1}}));
  SdpOptions opts;
  opts.has_start = true;
  opts.start = {1.0, 2.0};
  CHECK_THROWS_AS(solve_sdp(ok, opts), BadConfig);
}

TEST_CASE("dual construction requires a single block without equalities") {
  SdpProblem p = top_eigenvalue_problem(SymMatrix::from_rows({{1}}));
  p.eq_a = Matrix(1, 1);
  p.eq_a(0, 0) = 1.0;
  p.eq_b = {1.0};
  CHECK_THROWS_AS(sdp_dual(p), BadConfig);

  SdpProblem two = top_eigenvalue_problem(SymMatrix::from_rows({{1}}));
  two.blocks.push_back(two.blocks.front());
  CHECK_THROWS_AS(sdp_dual(two), BadConfig);
}

TEST_CASE("random spectral instances match the eigenvalue oracle with certified gaps") {
  auto rng = make_rng(20260817);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(uniform_int(rng, 0, 6));
    SymMatrix f0 = random_sym(rng, dim, -3.0, 3.0);
    auto p = top_eigenvalue_problem(f0);
    SdpSolution sol = solve_sdp(p);
    const double lmax = linalg::eigen_sym(f0).values.back();
    CHECK(std::abs(sol.p_star - lmax) <= 1e-5 * (1.0 + std::abs(lmax)));
    CHECK(sol.gap >= -1e-9);
    CHECK(sol.gap <= 1e-6 * (1.0 + std::abs(sol.p_star)));
    CHECK(min_eigenvalue(sol.z_opt[0]) >= -1e-8);
    REQUIRE(!sol.trace.empty());
    double prev_w = 0.0;
    for (const auto& rec : sol.trace) {
      CHECK(rec.dual <= rec.primal + 1e-9);
      CHECK(rec.weight > prev_w);
      prev_w = rec.weight;
    }
  }
}

TEST_CASE("solves are deterministic at the bit level") {
  auto rng = make_rng(99);
  SymMatrix f0 = random_sym(rng, 5, 2.0);
  auto p = top_eigenvalue_problem(f0);
  SdpSolution a = solve_sdp(p);
  SdpSolution b = solve_sdp(p);
  CHECK(a.p_star == b.p_star);
  CHECK(a.d_star == b.d_star);
  REQUIRE(a.u_opt.size() == b.u_opt.size());
  for (std::size_t i = 0; i < a.u_opt.size(); ++i) CHECK(a.u_opt[i] == b.u_opt[i]);
}

namespace {

// Two antipodal points on a line, one per class: the margin program on the
// linear kernel has value 1 hard, 3/4 at box 1/4, and 2/3 at ridge 1.
KernelFamily two_point_family() {
  KernelMatrix k;
  k.entries = SymMatrix::from_rows({{1, -1}, {-1, 1}});
  k.n_tr = 2;
  return make_family({k}, 2.0);
}

double solve_built(const KernelLearningSdp& built, bool use_start) {
  SdpOptions opts;
  if (use_start) {
    opts.has_start = true;
    opts.start = built.start;
  }
  SdpSolution sol = solve_sdp(built.problem, opts);
  return sol.u_opt[built.t_index];
}

}  // namespace

TEST_CASE("margin epigraph builder reproduces the closed-form two-point values") {
  KernelFamily family = two_point_family();
  const std::vector<int> y = {1, -1};

  auto hard = build_kernel_learning_sdp(family, y, MarginParams::hard());
  CHECK(solve_built(hard, true) == doctest::Approx(1.0).epsilon(1e-4));

  auto box = build_kernel_learning_sdp(family, y, MarginParams::soft_l1(0.25));
  CHECK(solve_built(box, true) == doctest::Approx(0.75).epsilon(1e-4));

  auto ridge = build_kernel_learning_sdp(family, y, MarginParams::soft_l2(1.0));
  CHECK(solve_built(ridge, true) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  // A cold solve exercises the feasibility search. Only the ridge variant
  // keeps the search's interior wide: without a ridge the train diagonal sits
  // at the jitter scale and a cold solve would grind against that wall.
  CHECK(solve_built(ridge, false) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("builder analytic starts are strictly feasible and layouts label every variable") {
  KernelFamily family = two_point_family();
  const std::vector<int> y = {1, -1};
  auto built = build_kernel_learning_sdp(family, y, MarginParams::soft_l1(0.5));
  CHECK(built.m == 1);
  CHECK(built.nu_offset == 1);
  CHECK(built.delta_offset == 3);
  CHECK(built.lambda_index == 5);
  CHECK(built.t_index == 6);
  CHECK(built.problem.q == 7);
  CHECK(built.tau_index == SIZE_MAX);
  // Every block must be strictly negative definite at the start.
  for (const auto& blk : built.problem.blocks) {
    SymMatrix f = blk.f[0];
    for (std::size_t j = 0; j < built.problem.q; ++j) {
      f.add_scaled(blk.f[j + 1], built.start[j]);
    }
    CHECK(linalg::eigen_sym(f).values.back() < 0.0);
  }
  // The start satisfies the trace budget row exactly.
  double acc = 0.0;
  for (std::size_t i = 0; i < built.m; ++i) {
    acc += built.problem.eq_a(0, i) * built.start[i];
  }
  CHECK(acc == doctest::Approx(family.budget).epsilon(1e-12));
}

TEST_CASE("two-candidate epigraph matches a fine sweep over the trace segment") {
  auto rng = make_rng(4242);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 4;
    std::vector<int> y = random_labels(rng, n);
    KernelMatrix k1{random_psd(rng, n), n};
    KernelMatrix k2{random_psd(rng, n), n};
    for (std::size_t i = 0; i < n; ++i) {
      k1.entries.ref(i, i) += 0.2;  // keep both traces positive
      k2.entries.ref(i, i) += 0.2;
    }
    KernelFamily family = make_family({k1, k2}, 3.0);
    MarginParams params = MarginParams::soft_l1(1.0);

    auto built = build_kernel_learning_sdp(family, y, params);
    SdpOptions opts;
    opts.has_start = true;
    opts.start = built.start;
    SdpSolution sol = solve_sdp(built.problem, opts);
    const double t_star = sol.u_opt[built.t_index];

    SymMatrix g1 = label_gram(partition_blocks(k1).train, y);
    SymMatrix g2 = label_gram(partition_blocks(k2).train, y);
    const double r1 = family.traces[0];
    const double r2 = family.traces[1];
    const double inf = std::numeric_limits<double>::infinity();

    // Margin value along the trace-budget line, infinite off the psd cone.
    // A whisker of ridge keeps boundary evaluations inside the dual solver.
    auto value_at = [&](double mu1, double floor_tol = -1e-10,
                        double ridge = 2e-8) -> double {
      const double mu2 = (family.budget - mu1 * r1) / r2;
      SymMatrix kc = k1.entries;
      kc.scale(mu1);
      kc.add_scaled(k2.entries, mu2);
      if (linalg::eigen_sym(kc).values.front() < floor_tol) return inf;
      SymMatrix g = g1;
      g.scale(mu1);
      g.add_scaled(g2, mu2);
      for (std::size_t i = 0; i < n; ++i) g.ref(i, i) += ridge;
      return solve_generalized_measure(g, y, params).objective;
    };

    // The feasible set is the whole psd section of the line, and the best
    // mixture may use a negative weight, so the reference sweep has to cover
    // both sides of the nonnegative segment.
    const double top = family.budget / r1;
    double lo = -8.0 * top, hi = 9.0 * top;
    const int coarse = 1700;
    double best_psd = inf, best_mu1 = 0.0;
    int first_ok = -1, last_ok = -1;
    for (int s = 0; s <= coarse; ++s) {
      const double mu1 = lo + (hi - lo) * static_cast<double>(s) / coarse;
      const double val = value_at(mu1);
      if (val == inf) continue;
      if (first_ok < 0) first_ok = s;
      last_ok = s;
      if (val < best_psd) {
        best_psd = val;
        best_mu1 = mu1;
      }
    }
    REQUIRE(first_ok > 0);
    REQUIRE(last_ok < coarse);
    double radius = (hi - lo) / coarse;
    for (int round = 0; round < 3; ++round) {
      const double center = best_mu1;
      for (int s = -10; s <= 10; ++s) {
        const double mu1 = center + radius * static_cast<double>(s) / 10.0;
        const double val = value_at(mu1);
        if (val < best_psd) {
          best_psd = val;
          best_mu1 = mu1;
        }
      }
      radius /= 10.0;
    }

    // Restricting the sweep to nonnegative mixtures only upper-bounds the
    // epigraph optimum.
    double best_nonneg = inf;
    for (int s = 0; s <= 400; ++s) {
      const double mu1 = top * static_cast<double>(s) / 400.0;
      if ((family.budget - mu1 * r1) / r2 < 0) break;
      best_nonneg = std::min(best_nonneg, value_at(mu1));
    }

    CHECK(t_star <= best_nonneg + 1e-5);
    CHECK(std::abs(t_star - best_psd) <= 2e-3 * (1.0 + std::abs(best_psd)));
    // The reported weights attain the reported value. The returned mixture
    // may ride the psd boundary as deep as the ridge the builder allows, so
    // the floor here is looser than the sweep's.
    const double at_mu = value_at(sol.u_opt[0], -1e-7, 1e-7);
    CHECK(std::abs(at_mu - t_star) <= 1e-4 * (1.0 + std::abs(t_star)));
  }
}

TEST_CASE("trace-budget tuning builder splits the budget between kernels and the ridge") {
  KernelFamily family = two_point_family();
  const std::vector<int> y = {1, -1};
  auto built = build_tau_tuning_sdp(family, y, std::numeric_limits<double>::infinity());
  CHECK(built.tau_index == 1);
  SdpOptions opts;
  opts.has_start = true;
  opts.start = built.start;
  SdpSolution sol = solve_sdp(built.problem, opts);
  const double mu = sol.u_opt[0];
  const double tau = sol.u_opt[built.tau_index];
  CHECK(tau >= -1e-9);
  // The budget row holds at the reported solution.
  CHECK(mu * family.traces[0] + tau * 2.0 == doctest::Approx(family.budget).epsilon(1e-7));
  // Tuned value can only improve on forcing the entire budget into the kernel.
  auto fixed = build_kernel_learning_sdp(family, y, MarginParams::hard());
  SdpOptions fopts;
  fopts.has_start = true;
  fopts.start = fixed.start;
  SdpSolution fsol = solve_sdp(fixed.problem, fopts);
  CHECK(sol.u_opt[built.t_index] <= fsol.u_opt[fixed.t_index] + 1e-6);
}

TEST_CASE("builders validate labels, margins, and family shape") {
  KernelFamily family = two_point_family();
  CHECK_THROWS_AS(build_kernel_learning_sdp(family, {1, 2}, MarginParams::hard()),
                  LabelOutOfRange);
  CHECK_THROWS_AS(build_kernel_learning_sdp(family, {1, 1}, MarginParams::hard()),
                  SingleClassLabels);
  CHECK_THROWS_AS(build_kernel_learning_sdp(family, {1}, MarginParams::hard()),
                  DimensionMismatch);
  CHECK_THROWS_AS(build_kernel_learning_sdp(family, {1, -1}, MarginParams::hard(), -1.0),
                  BadConfig);
  CHECK_THROWS_AS(build_tau_tuning_sdp(family, {1, -1}, 0.0), BadConfig);
  CHECK_THROWS_AS(make_family({}, 1.0), EmptyFamily);
  KernelMatrix zero{SymMatrix(2), 2};
  CHECK_THROWS_AS(make_family({zero}, 1.0), ZeroTrace);
  KernelMatrix good{SymMatrix::identity(2), 2};
  CHECK_THROWS_AS(make_family({good}, 0.0), TraceBudgetNonpositive);
  KernelMatrix other{SymMatrix::identity(3), 3};
  CHECK_THROWS_AS(make_family({good, other}, 1.0), DimensionMismatch);
}
