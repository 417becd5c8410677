#pragma once

// Synthetic LP instance generation for tests, benchmarks, and the CLI's
// generate subcommand. All kinds are deterministic in the seed, independent
// of platform: the raw 64-bit engine output is mapped to doubles directly
// instead of going through library distributions.
//
// Kinds:
//   RandomFeasible    — instance built around a sampled primal/dual pair that
//                       satisfies complementary slackness exactly, so the
//                       optimal objective value is known at construction.
//   RandomInfeasible  — a loose random instance plus one contradictory row
//                       pair (same coefficients, disjoint intervals), which
//                       guarantees primal infeasibility with a two-row ray.
//   Transport         — balanced transportation problem: equality rows for
//                       supplies and demands over nonnegative shipments.
//   FeasibilitySystem — consistent equality system A x = b with a known
//                       strictly positive solution, for feasibility-method
//                       studies.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdhglp/problem.hpp"
#include "pdhglp/sparse.hpp"

namespace pdhglp {

enum class InstanceKind { RandomFeasible, RandomInfeasible, Transport, FeasibilitySystem };

inline const char* instance_kind_name(InstanceKind k) {
  switch (k) {
    case InstanceKind::RandomFeasible: return "random-feasible";
    case InstanceKind::RandomInfeasible: return "random-infeasible";
    case InstanceKind::Transport: return "transport";
    case InstanceKind::FeasibilitySystem: return "feasibility-system";
  }
  return "random-feasible";
}

inline std::optional<InstanceKind> instance_kind_from_name(const std::string& s) {
  if (s == "random-feasible") return InstanceKind::RandomFeasible;
  if (s == "random-infeasible") return InstanceKind::RandomInfeasible;
  if (s == "transport") return InstanceKind::Transport;
  if (s == "feasibility-system") return InstanceKind::FeasibilitySystem;
  return std::nullopt;
}

struct GeneratorSpec {
  InstanceKind kind = InstanceKind::RandomFeasible;
  Index rows = 50;   // Transport: number of supply nodes
  Index cols = 100;  // Transport: number of demand nodes
  double density = 0.1;
  std::uint64_t seed = 1;
};

struct GeneratedInstance {
  LpProblem problem;
  // RandomFeasible: exact KKT point and its objective value.
  std::optional<Scalar> optimal_objective;
  Vector x_star;
  Vector y_star;
  Vector r_star;
  // FeasibilitySystem: strictly positive point with A x = b.
  Vector feasible_point;
};

namespace gen_detail {

// splitmix64: tiny, seedable, identical everywhere.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
  // Uniform over [lo, hi] excluding a symmetric band around zero; used for
  // matrix entries so no coefficient is vanishingly small.
  double signed_off_zero(double floor_mag, double hi) {
    const double mag = uniform(floor_mag, hi);
    return (next() & 1u) ? mag : -mag;
  }
  Index index_below(Index n) { return static_cast<Index>(next() % static_cast<std::uint64_t>(n)); }
};

inline std::vector<Triplet> random_triplets(Rng& rng, Index rows, Index cols, double density) {
  std::vector<Triplet> t;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (rng.u01() < density) t.push_back({r, c, rng.signed_off_zero(0.1, 1.0)});
    }
  }
  return t;
}

// Row-layout product, the same accumulation order kkt_residuals uses, so
// constraint bounds placed at these values have exactly zero violation.
inline Vector row_product(const SparseMatrix& a, const Vector& x) {
  Vector out(static_cast<size_t>(a.rows), 0.0);
  for (Index r = 0; r < a.rows; ++r) {
    Scalar acc = 0.0;
    for (Index k = a.by_row.start[static_cast<size_t>(r)];
         k < a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      acc += a.by_row.value[static_cast<size_t>(k)] *
             x[static_cast<size_t>(a.by_row.index[static_cast<size_t>(k)])];
    }
    out[static_cast<size_t>(r)] = acc;
  }
  return out;
}

// Column-layout product, the accumulation order of dual-residual checks, so
// objectives assembled as (A'y)_i + r_i have exactly zero dual residual.
inline Vector col_product(const SparseMatrix& a, const Vector& y) {
  Vector out(static_cast<size_t>(a.cols), 0.0);
  for (Index c = 0; c < a.cols; ++c) {
    Scalar acc = 0.0;
    for (Index k = a.by_col.start[static_cast<size_t>(c)];
         k < a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      acc += a.by_col.value[static_cast<size_t>(k)] *
             y[static_cast<size_t>(a.by_col.index[static_cast<size_t>(k)])];
    }
    out[static_cast<size_t>(c)] = acc;
  }
  return out;
}

inline GeneratedInstance make_random_feasible(Rng& rng, Index m, Index n, double density) {
  GeneratedInstance out;
  LpProblem& p = out.problem;
  p.a = SparseMatrix::from_triplets(m, n, random_triplets(rng, m, n, density));

  // Sample the primal point first, then carve bounds and duals around it so
  // that complementary slackness holds exactly at (x*, y*, r*).
  out.x_star.resize(static_cast<size_t>(n));
  for (auto& v : out.x_star) v = rng.uniform(-1.0, 1.0);
  const Vector ax = row_product(p.a, out.x_star);

  p.con_lower.resize(static_cast<size_t>(m));
  p.con_upper.resize(static_cast<size_t>(m));
  out.y_star.resize(static_cast<size_t>(m));
  for (Index j = 0; j < m; ++j) {
    const size_t jj = static_cast<size_t>(j);
    const double pick = rng.u01();
    const Scalar margin = rng.uniform(0.1, 1.1);
    if (pick < 1.0 / 3.0) {
      // Inactive range row: strictly interior, zero dual.
      out.y_star[jj] = 0.0;
      p.con_lower[jj] = ax[jj] - margin;
      p.con_upper[jj] = ax[jj] + rng.uniform(0.1, 1.1);
    } else if (pick < 2.0 / 3.0) {
      // Active at the lower bound: positive dual.
      out.y_star[jj] = rng.uniform(0.1, 1.1);
      p.con_lower[jj] = ax[jj];
      p.con_upper[jj] = (rng.u01() < 0.5) ? kInf : ax[jj] + margin;
    } else {
      // Active at the upper bound: negative dual.
      out.y_star[jj] = -rng.uniform(0.1, 1.1);
      p.con_upper[jj] = ax[jj];
      p.con_lower[jj] = (rng.u01() < 0.5) ? -kInf : ax[jj] - margin;
    }
  }

  const Vector aty = col_product(p.a, out.y_star);
  p.var_lower.resize(static_cast<size_t>(n));
  p.var_upper.resize(static_cast<size_t>(n));
  p.objective.resize(static_cast<size_t>(n));
  out.r_star.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const size_t ii = static_cast<size_t>(i);
    const double pick = rng.u01();
    const Scalar margin = rng.uniform(0.1, 1.1);
    if (pick < 0.4) {
      // Interior variable: zero reduced cost, comfortable box.
      out.r_star[ii] = 0.0;
      p.var_lower[ii] = (rng.u01() < 0.2) ? -kInf : out.x_star[ii] - margin;
      p.var_upper[ii] = (rng.u01() < 0.2) ? kInf : out.x_star[ii] + margin;
    } else if (pick < 0.7) {
      // At the lower bound: positive reduced cost.
      out.r_star[ii] = rng.uniform(0.1, 1.1);
      p.var_lower[ii] = out.x_star[ii];
      p.var_upper[ii] = (rng.u01() < 0.5) ? kInf : out.x_star[ii] + margin;
    } else {
      // At the upper bound: negative reduced cost.
      out.r_star[ii] = -rng.uniform(0.1, 1.1);
      p.var_upper[ii] = out.x_star[ii];
      p.var_lower[ii] = (rng.u01() < 0.5) ? -kInf : out.x_star[ii] - margin;
    }
    p.objective[ii] = aty[ii] + out.r_star[ii];
    // Fold the rounding of the sum back into the reduced cost so that
    // (objective - aty) - r evaluates to exactly zero.  The adjustment is at
    // most one ulp, which cannot flip the sign of entries bounded away from
    // zero, so the complementarity structure above is preserved.
    out.r_star[ii] = p.objective[ii] - aty[ii];
  }

  Scalar obj = 0.0;
  for (size_t i = 0; i < out.x_star.size(); ++i) obj += p.objective[i] * out.x_star[i];
  out.optimal_objective = obj;
  return out;
}

inline GeneratedInstance make_random_infeasible(Rng& rng, Index m, Index n, double density) {
  if (m < 2) m = 2;
  GeneratedInstance out;
  LpProblem& p = out.problem;

  // m-2 loose rows plus a contradictory pair sharing the same coefficients:
  // a'x <= t-1 and a'x >= t+1 admit no solution, and the dual ray
  // (-1 on the first, +1 on the second) cancels exactly in A'y.
  std::vector<Triplet> t = random_triplets(rng, m - 2, n, density);
  const Index ra = m - 2;
  const Index rb = m - 1;
  bool pair_nonempty = false;
  for (Index c = 0; c < n; ++c) {
    if (rng.u01() < std::max(density, 0.5)) {
      const Scalar v = rng.signed_off_zero(0.1, 1.0);
      t.push_back({ra, c, v});
      t.push_back({rb, c, v});
      pair_nonempty = true;
    }
  }
  if (!pair_nonempty) {
    const Index c = rng.index_below(n);
    t.push_back({ra, c, 1.0});
    t.push_back({rb, c, 1.0});
  }
  p.a = SparseMatrix::from_triplets(m, n, t);

  p.objective.resize(static_cast<size_t>(n));
  p.var_lower.assign(static_cast<size_t>(n), 0.0);
  p.var_upper.assign(static_cast<size_t>(n), kInf);
  // Nonnegative costs over x >= 0 rule out any improving recession direction,
  // so a ray-based verdict can only be primal infeasibility, never dual.
  for (auto& c : p.objective) c = rng.uniform(0.1, 1.1);

  p.con_lower.assign(static_cast<size_t>(m), -kInf);
  p.con_upper.assign(static_cast<size_t>(m), kInf);
  for (Index j = 0; j < m - 2; ++j) {
    // Wide two-sided rows that cannot interfere with the contradiction.
    const Scalar w = static_cast<Scalar>(n) + rng.uniform(5.0, 10.0);
    p.con_lower[static_cast<size_t>(j)] = -w;
    p.con_upper[static_cast<size_t>(j)] = w;
  }
  const Scalar tcenter = rng.uniform(-1.0, 1.0);
  p.con_upper[static_cast<size_t>(ra)] = tcenter - 1.0;  // a'x <= t-1
  p.con_lower[static_cast<size_t>(ra)] = -kInf;
  p.con_lower[static_cast<size_t>(rb)] = tcenter + 1.0;  // a'x >= t+1
  p.con_upper[static_cast<size_t>(rb)] = kInf;
  return out;
}

inline GeneratedInstance make_transport(Rng& rng, Index sources, Index sinks) {
  GeneratedInstance out;
  LpProblem& p = out.problem;
  const Index m = sources + sinks;
  const Index n = sources * sinks;

  Vector supply(static_cast<size_t>(sources));
  Vector demand(static_cast<size_t>(sinks));
  Scalar total = 0.0;
  for (auto& s : supply) {
    s = rng.uniform(1.0, 2.0);
    total += s;
  }
  Scalar draw = 0.0;
  for (auto& d : demand) {
    d = rng.uniform(1.0, 2.0);
    draw += d;
  }
  for (auto& d : demand) d *= total / draw;  // balance supply and demand

  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(2 * n));
  p.objective.resize(static_cast<size_t>(n));
  for (Index s = 0; s < sources; ++s) {
    for (Index d = 0; d < sinks; ++d) {
      const Index var = s * sinks + d;
      t.push_back({s, var, 1.0});
      t.push_back({sources + d, var, 1.0});
      p.objective[static_cast<size_t>(var)] = rng.uniform(0.1, 1.1);
    }
  }
  p.a = SparseMatrix::from_triplets(m, n, t);

  p.con_lower.resize(static_cast<size_t>(m));
  p.con_upper.resize(static_cast<size_t>(m));
  for (Index s = 0; s < sources; ++s) {
    p.con_lower[static_cast<size_t>(s)] = supply[static_cast<size_t>(s)];
    p.con_upper[static_cast<size_t>(s)] = supply[static_cast<size_t>(s)];
  }
  for (Index d = 0; d < sinks; ++d) {
    p.con_lower[static_cast<size_t>(sources + d)] = demand[static_cast<size_t>(d)];
    p.con_upper[static_cast<size_t>(sources + d)] = demand[static_cast<size_t>(d)];
  }
  p.var_lower.assign(static_cast<size_t>(n), 0.0);
  p.var_upper.assign(static_cast<size_t>(n), kInf);

  // Proportional split is always feasible for a balanced instance.
  out.feasible_point.resize(static_cast<size_t>(n));
  for (Index s = 0; s < sources; ++s) {
    for (Index d = 0; d < sinks; ++d) {
      out.feasible_point[static_cast<size_t>(s * sinks + d)] =
          supply[static_cast<size_t>(s)] * demand[static_cast<size_t>(d)] / total;
    }
  }
  return out;
}

inline GeneratedInstance make_feasibility_system(Rng& rng, Index m, Index n, double density) {
  GeneratedInstance out;
  LpProblem& p = out.problem;
  std::vector<Triplet> t = random_triplets(rng, m, n, density);
  // Guarantee every row touches at least one variable so b is never forced
  // to zero by an empty row.
  std::vector<bool> hit(static_cast<size_t>(m), false);
  for (const Triplet& e : t) hit[static_cast<size_t>(e.row)] = true;
  for (Index j = 0; j < m; ++j) {
    if (!hit[static_cast<size_t>(j)]) t.push_back({j, rng.index_below(n), rng.signed_off_zero(0.1, 1.0)});
  }
  p.a = SparseMatrix::from_triplets(m, n, t);

  out.feasible_point.resize(static_cast<size_t>(n));
  for (auto& v : out.feasible_point) v = rng.uniform(0.1, 1.1);
  const Vector b = row_product(p.a, out.feasible_point);

  p.objective.assign(static_cast<size_t>(n), 0.0);
  p.con_lower = b;
  p.con_upper = b;
  p.var_lower.assign(static_cast<size_t>(n), 0.0);
  p.var_upper.assign(static_cast<size_t>(n), kInf);
  return out;
}

}  // namespace gen_detail

inline GeneratedInstance generate_instance(const GeneratorSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) {
    throw std::invalid_argument("instance generation needs rows >= 1 and cols >= 1");
  }
  if (!(spec.density > 0.0) || spec.density > 1.0) {
    throw std::invalid_argument("instance generation needs density in (0, 1]");
  }
  gen_detail::Rng rng(spec.seed * 0x2545f4914f6cdd1dull + 0x9e3779b97f4a7c15ull);
  GeneratedInstance out;
  switch (spec.kind) {
    case InstanceKind::RandomFeasible:
      out = gen_detail::make_random_feasible(rng, spec.rows, spec.cols, spec.density);
      break;
    case InstanceKind::RandomInfeasible:
      out = gen_detail::make_random_infeasible(rng, spec.rows, spec.cols, spec.density);
      break;
    case InstanceKind::Transport:
      out = gen_detail::make_transport(rng, spec.rows, spec.cols);
      break;
    case InstanceKind::FeasibilitySystem:
      out = gen_detail::make_feasibility_system(rng, spec.rows, spec.cols, spec.density);
      break;
  }
  if (auto issue = validate(out.problem)) {
    throw std::logic_error("generated instance failed validation: " + issue->message);
  }
  return out;
}

}  // namespace pdhglp
