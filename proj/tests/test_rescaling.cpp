#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "pdhglp/rescaling.hpp"
#include "test_util.hpp"

using namespace pdhglp;
using testutil::Rng;

namespace {

Scalar dense_entry(const LpProblem& p, Index r, Index c) {
  for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
       k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
    if (p.a.by_row.index[static_cast<size_t>(k)] == c) {
      return p.a.by_row.value[static_cast<size_t>(k)];
    }
  }
  return 0.0;
}

LpProblem problem_with_matrix(SparseMatrix a) {
  LpProblem p;
  p.objective.assign(static_cast<size_t>(a.cols), 1.0);
  p.con_lower.assign(static_cast<size_t>(a.rows), -1.0);
  p.con_upper.assign(static_cast<size_t>(a.rows), 1.0);
  p.var_lower.assign(static_cast<size_t>(a.cols), 0.0);
  p.var_upper.assign(static_cast<size_t>(a.cols), 2.0);
  p.a = std::move(a);
  return p;
}

}  // namespace

TEST_CASE("one equilibration pass on a diagonal matrix") {
  LpProblem p = problem_with_matrix(
      SparseMatrix::from_triplets(2, 2, {{0, 0, 4.0}, {1, 1, 9.0}}));
  RescalingInfo info = identity_rescaling(2, 2);
  const PassFactors f = ruiz_pass(p, info);
  CHECK(f.row == Vector{2.0, 3.0});
  CHECK(f.col == Vector{2.0, 3.0});
  CHECK(dense_entry(p, 0, 0) == 1.0);
  CHECK(dense_entry(p, 1, 1) == 1.0);
  CHECK(info.row_scale == Vector{0.5, 1.0 / 3.0});
  CHECK(layouts_consistent(p.a));
}

TEST_CASE("one 1-norm pass matches the hand-computed example") {
  LpProblem p = problem_with_matrix(
      SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 2.0}}));
  RescalingInfo info = identity_rescaling(2, 2);
  pock_chambolle_pass(p, info);
  CHECK_THAT(dense_entry(p, 0, 0), Catch::Matchers::WithinRel(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(dense_entry(p, 0, 1), Catch::Matchers::WithinRel(1.0 / std::sqrt(6.0), 1e-15));
  CHECK_THAT(dense_entry(p, 1, 1), Catch::Matchers::WithinRel(2.0 / std::sqrt(6.0), 1e-15));
  CHECK(dense_entry(p, 1, 0) == 0.0);
}

TEST_CASE("ten equilibration passes drive nonzero norms near one") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    // Spread magnitudes over several orders to make equilibration earn it.
    std::vector<Triplet> t = testutil::random_triplets(rng, 60, 50, 0.15);
    for (auto& e : t) e.value *= std::pow(10.0, testutil::uniform(rng, -4.0, 4.0));
    LpProblem p = problem_with_matrix(SparseMatrix::from_triplets(60, 50, t));
    RescalingInfo info = identity_rescaling(60, 50);
    for (int pass = 0; pass < 10; ++pass) ruiz_pass(p, info);
    for (Index r = 0; r < p.a.rows; ++r) {
      Scalar mx = 0.0;
      for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
           k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
        mx = std::max(mx, std::abs(p.a.by_row.value[static_cast<size_t>(k)]));
      }
      if (mx > 0.0) {
        CHECK(mx >= 0.9);
        CHECK(mx <= 1.1);
      }
    }
    for (Index c = 0; c < p.a.cols; ++c) {
      Scalar mx = 0.0;
      for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
           k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
        mx = std::max(mx, std::abs(p.a.by_col.value[static_cast<size_t>(k)]));
      }
      if (mx > 0.0) {
        CHECK(mx >= 0.9);
        CHECK(mx <= 1.1);
      }
    }
  }
}

TEST_CASE("zero rows and columns and infinite bounds survive the pipeline") {
  // Row 1 and column 2 are empty; bounds mix infinities.
  LpProblem p;
  p.a = SparseMatrix::from_triplets(2, 3, {{0, 0, 5.0}, {0, 1, 0.25}});
  p.objective = {1.0, -2.0, 3.0};
  p.con_lower = {-kInf, -kInf};
  p.con_upper = {10.0, kInf};
  p.var_lower = {0.0, -kInf, -1.0};
  p.var_upper = {kInf, kInf, 1.0};
  const ScaledProblem sp = apply_rescaling(p);
  for (Scalar s : sp.info.row_scale) {
    CHECK(s > 0.0);
    CHECK(pdhglp::is_finite(s));
  }
  for (Scalar s : sp.info.col_scale) {
    CHECK(s > 0.0);
    CHECK(pdhglp::is_finite(s));
  }
  CHECK(sp.info.row_scale[1] == 1.0);  // empty row untouched
  CHECK(sp.info.col_scale[2] == 1.0);  // empty column untouched
  CHECK(sp.problem.con_lower[0] == -kInf);
  CHECK(sp.problem.con_upper[1] == kInf);
  CHECK(sp.problem.var_upper[0] == kInf);
  CHECK(sp.problem.var_lower[1] == -kInf);
  for (Scalar v : sp.problem.con_upper) CHECK(!std::isnan(v));
  CHECK(!validate(sp.problem).has_value());
}

TEST_CASE("scaling preserves problem equivalence") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Triplet> t = testutil::random_triplets(rng, 25, 30, 0.3);
    for (auto& e : t) e.value *= std::pow(10.0, testutil::uniform(rng, -3.0, 3.0));
    LpProblem p = problem_with_matrix(SparseMatrix::from_triplets(25, 30, t));
    for (auto& v : p.objective) v = testutil::uniform(rng, -2.0, 2.0);
    const ScaledProblem sp = apply_rescaling(p);

    // Matrix round-trip: scaled entry * cumulative scales reproduces A.
    for (Index r = 0; r < p.a.rows; ++r) {
      for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
           k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
        const Index c = p.a.by_row.index[static_cast<size_t>(k)];
        const Scalar orig = p.a.by_row.value[static_cast<size_t>(k)];
        const Scalar scaled = sp.problem.a.by_row.value[static_cast<size_t>(k)];
        const Scalar back = scaled / (sp.info.row_scale[static_cast<size_t>(r)] *
                                      sp.info.col_scale[static_cast<size_t>(c)]);
        CHECK_THAT(back, Catch::Matchers::WithinRel(orig, 1e-12));
      }
    }

    // A random scaled-feasible point maps to an original-feasible point with
    // equal objective value and exactly corresponding residual distances.
    Vector xs(static_cast<size_t>(p.cols()));
    for (size_t i = 0; i < xs.size(); ++i) {
      xs[i] = clamp(testutil::uniform(rng, -1.0, 3.0), sp.problem.var_lower[i],
                    sp.problem.var_upper[i]);
    }
    Vector x;
    unscale_primal(sp.info, xs, x);
    for (size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i] >= p.var_lower[i] - 1e-9);
      CHECK(x[i] <= p.var_upper[i] + 1e-9);
    }
    Scalar obj_scaled = 0.0, obj_orig = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      obj_scaled += sp.problem.objective[i] * xs[i];
      obj_orig += p.objective[i] * x[i];
    }
    CHECK_THAT(obj_scaled, Catch::Matchers::WithinAbs(obj_orig, 1e-9 * (1.0 + std::abs(obj_orig))));

    const Vector ax_scaled = testutil::dense_spmv(sp.problem.a, xs);
    const Vector ax_orig = testutil::dense_spmv(p.a, x);
    for (Index j = 0; j < p.rows(); ++j) {
      const Scalar ds = interval_distance(ax_scaled[static_cast<size_t>(j)],
                                          sp.problem.con_lower[static_cast<size_t>(j)],
                                          sp.problem.con_upper[static_cast<size_t>(j)]);
      const Scalar dorig = interval_distance(ax_orig[static_cast<size_t>(j)],
                                             p.con_lower[static_cast<size_t>(j)],
                                             p.con_upper[static_cast<size_t>(j)]);
      const Scalar mapped = ds / sp.info.row_scale[static_cast<size_t>(j)];
      CHECK_THAT(mapped, Catch::Matchers::WithinAbs(dorig, 1e-8 * (1.0 + std::abs(dorig))));
    }
  }
}

TEST_CASE("dual quantities unscale consistently") {
  Rng rng(41);
  LpProblem p = problem_with_matrix(testutil::random_matrix(rng, 15, 20, 0.4));
  for (auto& v : p.objective) v = testutil::uniform(rng, -2.0, 2.0);
  const ScaledProblem sp = apply_rescaling(p);

  const Vector ys = testutil::random_vector(rng, p.rows());
  Vector y;
  unscale_dual(sp.info, ys, y);

  // c~ - A~'y~ must equal (c - A'y) scaled by 1/col_scale per coordinate,
  // i.e. unscale_reduced_costs maps one to the other.
  Vector rt_scaled(static_cast<size_t>(p.cols()), 0.0);
  Vector rt_orig(static_cast<size_t>(p.cols()), 0.0);
  for (Index c = 0; c < p.cols(); ++c) {
    Scalar acc_s = 0.0, acc_o = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      const Index r = p.a.by_col.index[static_cast<size_t>(k)];
      acc_s += sp.problem.a.by_col.value[static_cast<size_t>(k)] * ys[static_cast<size_t>(r)];
      acc_o += p.a.by_col.value[static_cast<size_t>(k)] * y[static_cast<size_t>(r)];
    }
    rt_scaled[static_cast<size_t>(c)] = sp.problem.objective[static_cast<size_t>(c)] - acc_s;
    rt_orig[static_cast<size_t>(c)] = p.objective[static_cast<size_t>(c)] - acc_o;
  }
  Vector mapped;
  unscale_reduced_costs(sp.info, rt_scaled, mapped);
  for (size_t i = 0; i < mapped.size(); ++i) {
    CHECK_THAT(mapped[i], Catch::Matchers::WithinAbs(rt_orig[i], 1e-9 * (1.0 + std::abs(rt_orig[i]))));
  }
}
