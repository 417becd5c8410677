#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pdhglp/solver.hpp"
#include "test_util.hpp"

using namespace pdhglp;
using testutil::Rng;

namespace {

// Box LP with deliberately slack two-sided rows: |a_ij| <= 1 and |x_i| <= 1,
// so |(Ax)_j| < cols < the row bound and no constraint can ever bind. The
// optimum is the separable box corner with value sum_i min(c_i*lo_i, c_i*hi_i).
LpProblem slack_row_box_lp(Rng& rng, Index rows, Index cols) {
  LpProblem p;
  p.a = testutil::random_matrix(rng, rows, cols, 0.6);
  p.objective = testutil::random_vector(rng, cols, -2.0, 2.0);
  p.con_lower.assign(static_cast<size_t>(rows), -static_cast<Scalar>(cols) - 10.0);
  p.con_upper.assign(static_cast<size_t>(rows), static_cast<Scalar>(cols) + 10.0);
  p.var_lower = testutil::random_vector(rng, cols, -1.0, -0.1);
  p.var_upper = testutil::random_vector(rng, cols, 0.1, 1.0);
  return p;
}

Scalar box_corner_optimum(const LpProblem& p) {
  Scalar v = 0.0;
  for (size_t i = 0; i < p.objective.size(); ++i) {
    v += std::min(p.objective[i] * p.var_lower[i], p.objective[i] * p.var_upper[i]);
  }
  return v;
}

// Equality-constrained LP built around a known interior point, so the
// instance is always feasible and the compact box keeps it bounded.
LpProblem equality_lp(Rng& rng, Index rows, Index cols) {
  LpProblem p;
  p.a = testutil::random_matrix(rng, rows, cols, 0.4);
  p.objective = testutil::random_vector(rng, cols, -1.0, 1.0);
  const Vector xhat = testutil::random_vector(rng, cols, 0.5, 1.5);
  const Vector b = testutil::dense_spmv(p.a, xhat);
  p.con_lower = b;
  p.con_upper = b;
  p.var_lower.assign(static_cast<size_t>(cols), 0.0);
  p.var_upper.assign(static_cast<size_t>(cols), 2.0);
  return p;
}

}  // namespace

TEST_CASE("a small inequality problem solves to optimality") {
  const LpProblem p = testutil::tiny_lp();
  SolverOptions opt;
  opt.tolerances.eps_rel_gap = 1e-9;
  const SolveResult out = solve(p, opt);

  CHECK(out.status == SolveStatus::Optimal);
  REQUIRE(out.x.size() == 2);
  REQUIRE(out.y.size() == 1);
  REQUIRE(out.reduced_costs.size() == 2);
  CHECK(out.x[0] == Catch::Approx(0.0).margin(1e-6));
  CHECK(out.x[1] == Catch::Approx(1.0).margin(1e-6));
  CHECK(out.y[0] == Catch::Approx(-2.0).margin(1e-6));
  CHECK(out.reduced_costs[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(out.reduced_costs[1] == Catch::Approx(0.0).margin(1e-6));
  CHECK(out.summary.primal_objective == Catch::Approx(-2.0).margin(1e-7));

  // The reported summary meets the requested tolerances and agrees with an
  // independent recomputation from the returned vectors.
  CHECK(out.summary.primal_residual_inf <= opt.tolerances.eps_primal);
  CHECK(out.summary.dual_residual_inf <= opt.tolerances.eps_dual);
  CHECK(out.summary.rel_gap <= opt.tolerances.eps_rel_gap);
  const ResidualSummary again = kkt_residuals(p, out.x, out.y, out.reduced_costs);
  CHECK(again.primal_residual_inf == out.summary.primal_residual_inf);
  CHECK(again.dual_residual_inf == out.summary.dual_residual_inf);
  CHECK(again.abs_gap == out.summary.abs_gap);

  CHECK(out.iterations > 0);
  CHECK(!out.termination_detail.empty());
  CHECK(out.solve_seconds >= 0.0);
}

TEST_CASE("box problems with slack rows reach the separable optimum") {
  Rng rng(314159);
  for (int trial = 0; trial < 4; ++trial) {
    const LpProblem p = slack_row_box_lp(rng, 6, 10);
    const Scalar expected = box_corner_optimum(p);
    SolverOptions opt;
    opt.tolerances.eps_rel_gap = 1e-9;
    const SolveResult out = solve(p, opt);
    INFO("trial " << trial);
    CHECK(out.status == SolveStatus::Optimal);
    CHECK(out.summary.primal_objective == Catch::Approx(expected).margin(1e-6));
  }
}

TEST_CASE("contradictory rows yield a verified primal infeasibility certificate") {
  LpProblem p;  // x1 + x2 <= 1 and x1 + x2 >= 3 cannot both hold
  p.a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  p.objective = {0.0, 0.0};
  p.con_lower = {-kInf, 3.0};
  p.con_upper = {1.0, kInf};
  p.var_lower = {0.0, 0.0};
  p.var_upper = {kInf, kInf};

  const SolveResult out = solve(p);
  REQUIRE(out.status == SolveStatus::PrimalInfeasible);
  REQUIRE(out.certificate.has_value());
  CHECK(out.certificate->kind == CertificateKind::PrimalInfeasible);
  CHECK(out.certificate->objective > 0.0);

  // Feeding the emitted ray back through the acceptance test on the original
  // data must reproduce a certificate.
  const auto echo = try_primal_infeasibility(p, out.certificate->ray_y, 1e-12, "echo");
  REQUIRE(echo.has_value());
  CHECK(echo->objective > 0.0);

  // The last iterates are still reported alongside the certificate.
  CHECK(out.x.size() == 2);
  CHECK(out.y.size() == 2);
  CHECK(!out.termination_detail.empty());
}

TEST_CASE("an unbounded objective yields a verified dual infeasibility certificate") {
  LpProblem p;  // min -x1 - x2 with only a lower row bound: drift up forever
  p.a = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
  p.objective = {-1.0, -1.0};
  p.con_lower = {1.0};
  p.con_upper = {kInf};
  p.var_lower = {0.0, 0.0};
  p.var_upper = {kInf, kInf};

  const SolveResult out = solve(p);
  REQUIRE(out.status == SolveStatus::DualInfeasible);
  REQUIRE(out.certificate.has_value());
  CHECK(out.certificate->kind == CertificateKind::DualInfeasible);
  CHECK(out.certificate->objective < 0.0);

  const auto echo = try_dual_infeasibility(p, out.certificate->ray_x, 1e-12, "echo");
  REQUIRE(echo.has_value());
  CHECK(echo->objective < 0.0);
}

TEST_CASE("repeat solves are bit-identical and pool size does not change the result") {
  Rng rng(2026);
  const LpProblem p = equality_lp(rng, 12, 16);
  SolverOptions a;
  a.tolerances.eps_rel_gap = 1e-9;
  a.threads = 1;
  a.shards_per_thread = 8;
  const SolveResult r1 = solve(p, a);
  const SolveResult r2 = solve(p, a);

  SolverOptions b = a;  // same shard layout split across a different pool
  b.threads = 2;
  b.shards_per_thread = 4;
  const SolveResult r3 = solve(p, b);

  REQUIRE(r1.status == SolveStatus::Optimal);
  CHECK(r2.status == r1.status);
  CHECK(r3.status == r1.status);
  CHECK(r2.iterations == r1.iterations);
  CHECK(r3.iterations == r1.iterations);
  CHECK(r2.restarts == r1.restarts);
  CHECK(r3.restarts == r1.restarts);
  CHECK(r2.final_step_size == r1.final_step_size);
  CHECK(r3.final_step_size == r1.final_step_size);
  CHECK(r2.final_primal_weight == r1.final_primal_weight);
  CHECK(r3.final_primal_weight == r1.final_primal_weight);

  REQUIRE(r2.x.size() == r1.x.size());
  REQUIRE(r3.x.size() == r1.x.size());
  for (size_t i = 0; i < r1.x.size(); ++i) {
    CHECK(r2.x[i] == r1.x[i]);
    CHECK(r3.x[i] == r1.x[i]);
  }
  REQUIRE(r2.y.size() == r1.y.size());
  REQUIRE(r3.y.size() == r1.y.size());
  for (size_t j = 0; j < r1.y.size(); ++j) {
    CHECK(r2.y[j] == r1.y[j]);
    CHECK(r3.y[j] == r1.y[j]);
  }
}

TEST_CASE("fixed step size and primal weight switch off adaptation") {
  const LpProblem p = testutil::tiny_lp();
  SolverOptions opt;
  opt.tolerances.eps_rel_gap = 1e-9;
  opt.fixed_step_size = 0.4;  // below 1/||A||_2 of the rescaled matrix
  opt.fixed_primal_weight = 1.0;
  opt.enable_restarts = false;
  opt.enable_polish = false;
  const SolveResult out = solve(p, opt);

  CHECK(out.status == SolveStatus::Optimal);
  CHECK(out.final_step_size == 0.4);
  CHECK(out.final_primal_weight == 1.0);
  CHECK(out.restarts == 0);
  CHECK(out.step_retries == 0);
  CHECK(out.min_step_size_limit == kInf);  // the adaptive limit is never evaluated
}

TEST_CASE("the observer sees every accepted step in order") {
  const LpProblem p = testutil::tiny_lp();
  SolverOptions opt;
  opt.tolerances.eps_rel_gap = 1e-9;
  std::vector<Index> seen;
  bool shapes_ok = true;
  opt.observer = [&](const IterationRecord& rec) {
    seen.push_back(rec.iteration);
    shapes_ok = shapes_ok && rec.x != nullptr && rec.y != nullptr && rec.x->size() == 2 &&
                rec.y->size() == 1 && rec.eta > 0.0 && rec.omega > 0.0;
  };
  const SolveResult out = solve(p, opt);

  CHECK(out.status == SolveStatus::Optimal);
  REQUIRE(static_cast<Index>(seen.size()) == out.iterations);
  for (size_t i = 0; i < seen.size(); ++i) {
    CHECK(seen[i] == static_cast<Index>(i) + 1);
  }
  CHECK(shapes_ok);
}

TEST_CASE("iteration and time limits are honored") {
  const LpProblem p = testutil::tiny_lp();

  SolverOptions hard;
  hard.tolerances.eps_rel_gap = 1e-12;  // unreachable within five steps
  hard.iteration_limit = 5;
  SolveResult out = solve(p, hard);
  CHECK(out.status == SolveStatus::IterationLimit);
  CHECK(out.iterations == 5);
  CHECK(out.x.size() == 2);  // the last iterate is still reported
  CHECK(out.y.size() == 1);

  SolverOptions timed;
  timed.time_limit_seconds = 0.0;
  out = solve(p, timed);
  CHECK(out.status == SolveStatus::TimeLimit);
  CHECK(out.iterations == 0);
  CHECK(out.x.size() == 2);
}

TEST_CASE("feature switches keep the solver correct") {
  Rng rng(7);
  const LpProblem p = slack_row_box_lp(rng, 6, 9);
  const Scalar expected = box_corner_optimum(p);
  for (int variant = 0; variant < 3; ++variant) {
    SolverOptions opt;
    opt.tolerances.eps_rel_gap = 1e-9;
    if (variant == 0) opt.enable_scaling = false;
    if (variant == 1) opt.enable_restarts = false;
    if (variant == 2) {
      opt.enable_polish = false;
      opt.detect_infeasibility = false;
    }
    const SolveResult out = solve(p, opt);
    INFO("variant " << variant);
    CHECK(out.status == SolveStatus::Optimal);
    CHECK(out.summary.primal_objective == Catch::Approx(expected).margin(1e-6));
    if (variant == 1) CHECK(out.restarts == 0);
    if (variant == 2) CHECK(out.polish_iterations == 0);
  }
}

TEST_CASE("feasibility polishing runs when the gap closes before feasibility") {
  Rng rng(11);
  const LpProblem p = equality_lp(rng, 20, 30);
  SolverOptions opt;
  opt.tolerances.eps_primal = 1e-11;
  opt.tolerances.eps_dual = 1e-6;
  opt.tolerances.eps_rel_gap = 0.5;  // passes long before the residuals do
  const SolveResult out = solve(p, opt);

  CHECK(out.status == SolveStatus::Optimal);
  CHECK(out.polish_iterations > 0);
  const ResidualSummary again = kkt_residuals(p, out.x, out.y, out.reduced_costs);
  CHECK(again.primal_residual_inf <= opt.tolerances.eps_primal);
  CHECK(again.dual_residual_inf <= opt.tolerances.eps_dual);
  CHECK(again.rel_gap <= opt.tolerances.eps_rel_gap);
}

TEST_CASE("a reckless fixed step reports a numerical failure") {
  LpProblem p;  // free variable, one equality row: a plain affine update map
  p.a = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
  p.objective = {0.0};
  p.con_lower = {1.0};
  p.con_upper = {1.0};
  p.var_lower = {-kInf};
  p.var_upper = {kInf};
  SolverOptions opt;
  opt.fixed_step_size = 10.0;  // far above 1/||A||: the iteration spirals out
  opt.enable_scaling = false;
  opt.enable_restarts = false;  // restarts onto the window average would damp the spiral
  opt.detect_infeasibility = false;
  opt.enable_polish = false;
  const SolveResult out = solve(p, opt);
  CHECK(out.status == SolveStatus::NumericalError);
  CHECK(!out.termination_detail.empty());
}

TEST_CASE("malformed problems are rejected up front") {
  LpProblem p = testutil::tiny_lp();
  p.objective.pop_back();
  CHECK_THROWS_AS(solve(p), std::invalid_argument);

  LpProblem q = testutil::tiny_lp();
  q.var_lower[0] = 2.0;
  q.var_upper[0] = 1.0;  // crossed box
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
}
