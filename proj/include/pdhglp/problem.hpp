#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdhglp/core.hpp"
#include "pdhglp/sparse.hpp"

namespace pdhglp {

// min c'x subject to con_lower <= A x <= con_upper and
// var_lower <= x <= var_upper. Bounds may be -inf/+inf; a two-sided finite
// pair encodes a range, an equal pair an equality.
struct LpProblem {
  SparseMatrix a;
  Vector objective;   // length cols
  Vector con_lower;   // length rows
  Vector con_upper;   // length rows
  Vector var_lower;   // length cols
  Vector var_upper;   // length cols

  Index rows() const { return a.rows; }
  Index cols() const { return a.cols; }
};

struct PrimalDualIterate {
  Vector x;
  Vector y;
};

// Sign cone attached to a bound pair. For variable i it is the set of valid
// reduced costs r_i; for constraint j the set of valid multipliers y_j.
// Finite lower bound admits positive values, finite upper bound negative
// ones; a doubly-infinite pair pins the value to zero.
enum class SignCone { Zero, NonPos, NonNeg, Free };

inline SignCone cone_of_bounds(Scalar lo, Scalar hi) {
  const bool lo_finite = lo > -kInf;
  const bool hi_finite = hi < kInf;
  if (lo_finite && hi_finite) return SignCone::Free;
  if (lo_finite) return SignCone::NonNeg;
  if (hi_finite) return SignCone::NonPos;
  return SignCone::Zero;
}

inline Scalar cone_project(Scalar v, SignCone cone) {
  switch (cone) {
    case SignCone::Zero: return 0.0;
    case SignCone::NonPos: return v < 0.0 ? v : 0.0;
    case SignCone::NonNeg: return v > 0.0 ? v : 0.0;
    case SignCone::Free: return v;
  }
  return v;
}

inline bool cone_contains(Scalar v, SignCone cone) { return cone_project(v, cone) == v; }

// Cone of valid reduced costs for variable i.
inline SignCone reduced_cost_cone(const LpProblem& p, Index i) {
  return cone_of_bounds(p.var_lower[static_cast<size_t>(i)], p.var_upper[static_cast<size_t>(i)]);
}

// Cone of valid dual multipliers for constraint j.
inline SignCone dual_cone(const LpProblem& p, Index j) {
  return cone_of_bounds(p.con_lower[static_cast<size_t>(j)], p.con_upper[static_cast<size_t>(j)]);
}

// p(y; lo, hi) = hi'[y]+ - lo'[y]-, with 0 * (+-inf) = 0. Always well defined
// with values in R union {+inf}: a +inf bound can only meet a zero
// coefficient or push the sum to +inf, never produce inf - inf.
inline Scalar dual_penalty(const Vector& y, const Vector& lo, const Vector& hi) {
  Scalar total = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const Scalar v = y[i];
    if (v > 0.0) {
      total += mul_zero_inf(hi[i], v);
    } else if (v < 0.0) {
      total += mul_zero_inf(lo[i], v);
    }
  }
  return total;
}

// L(x, y) = c'x - y'Ax - p(y; -con_upper, -con_lower). Finite for y with the
// valid sign pattern, -inf when an infinite penalty fires. Small sequential
// helper intended for checks and oracles, not the iteration path.
inline Scalar lagrangian(const LpProblem& p, const Vector& x, const Vector& y) {
  Scalar cx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) cx += p.objective[i] * x[i];
  Scalar y_ax = 0.0;
  for (Index r = 0; r < p.rows(); ++r) {
    Scalar row = 0.0;
    for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
         k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      row += p.a.by_row.value[static_cast<size_t>(k)] *
             x[static_cast<size_t>(p.a.by_row.index[static_cast<size_t>(k)])];
    }
    y_ax += y[static_cast<size_t>(r)] * row;
  }
  Scalar penalty = 0.0;
  for (size_t j = 0; j < y.size(); ++j) {
    const Scalar v = y[j];
    if (v > 0.0) {
      penalty += mul_zero_inf(-p.con_lower[j], v);
    } else if (v < 0.0) {
      penalty += mul_zero_inf(-p.con_upper[j], v);
    }
  }
  return cx - y_ax - penalty;
}

struct ValidationIssue {
  std::string message;
  Index index = -1;
};

// First violated model invariant, or nullopt when the problem is well formed.
inline std::optional<ValidationIssue> validate(const LpProblem& p) {
  const Index m = p.a.rows;
  const Index n = p.a.cols;
  if (static_cast<Index>(p.objective.size()) != n) return ValidationIssue{"objective length != cols", -1};
  if (static_cast<Index>(p.con_lower.size()) != m) return ValidationIssue{"con_lower length != rows", -1};
  if (static_cast<Index>(p.con_upper.size()) != m) return ValidationIssue{"con_upper length != rows", -1};
  if (static_cast<Index>(p.var_lower.size()) != n) return ValidationIssue{"var_lower length != cols", -1};
  if (static_cast<Index>(p.var_upper.size()) != n) return ValidationIssue{"var_upper length != cols", -1};
  for (Index i = 0; i < n; ++i) {
    const Scalar c = p.objective[static_cast<size_t>(i)];
    if (!is_finite(c)) return ValidationIssue{"objective entry not finite", i};
  }
  for (Index i = 0; i < n; ++i) {
    const Scalar lo = p.var_lower[static_cast<size_t>(i)];
    const Scalar hi = p.var_upper[static_cast<size_t>(i)];
    if (std::isnan(lo) || std::isnan(hi)) return ValidationIssue{"variable bound is NaN", i};
    if (lo == kInf) return ValidationIssue{"variable lower bound is +inf", i};
    if (hi == -kInf) return ValidationIssue{"variable upper bound is -inf", i};
    if (lo > hi) return ValidationIssue{"variable bounds crossed", i};
  }
  for (Index j = 0; j < m; ++j) {
    const Scalar lo = p.con_lower[static_cast<size_t>(j)];
    const Scalar hi = p.con_upper[static_cast<size_t>(j)];
    if (std::isnan(lo) || std::isnan(hi)) return ValidationIssue{"constraint bound is NaN", j};
    if (lo == kInf) return ValidationIssue{"constraint lower bound is +inf", j};
    if (hi == -kInf) return ValidationIssue{"constraint upper bound is -inf", j};
    if (lo > hi) return ValidationIssue{"constraint bounds crossed", j};
  }
  for (size_t k = 0; k < p.a.by_row.value.size(); ++k) {
    if (!is_finite(p.a.by_row.value[k])) {
      return ValidationIssue{"matrix entry not finite", static_cast<Index>(k)};
    }
  }
  if (!layouts_consistent(p.a)) return ValidationIssue{"row/column layouts disagree", -1};
  return std::nullopt;
}

enum class FeasibilityKind { Primal, Dual };

// A feasibility problem derived from a parent LP. Variables map one to one:
// for Primal they are the parent's x, for Dual the parent's y.
struct FeasibilitySubproblem {
  LpProblem problem;
  FeasibilityKind kind = FeasibilityKind::Primal;
  Index parent_rows = 0;
  Index parent_cols = 0;
};

// Same feasible region, zero objective.
inline FeasibilitySubproblem build_primal_feasibility(const LpProblem& parent) {
  FeasibilitySubproblem sub;
  sub.problem = parent;
  sub.problem.objective.assign(static_cast<size_t>(parent.cols()), 0.0);
  sub.kind = FeasibilityKind::Primal;
  sub.parent_rows = parent.rows();
  sub.parent_cols = parent.cols();
  return sub;
}

// Feasible region of the parent's dual: A'y with row i constrained so that
// c_i - (A'y)_i lands in the reduced-cost cone of variable i, and y_j boxed
// to its multiplier cone. Objective zero.
inline FeasibilitySubproblem build_dual_feasibility(const LpProblem& parent) {
  FeasibilitySubproblem sub;
  sub.kind = FeasibilityKind::Dual;
  sub.parent_rows = parent.rows();
  sub.parent_cols = parent.cols();
  LpProblem& q = sub.problem;
  q.a.rows = parent.cols();
  q.a.cols = parent.rows();
  q.a.by_row = parent.a.by_col;
  q.a.by_col = parent.a.by_row;
  q.objective.assign(static_cast<size_t>(parent.rows()), 0.0);
  q.con_lower.resize(static_cast<size_t>(parent.cols()));
  q.con_upper.resize(static_cast<size_t>(parent.cols()));
  for (Index i = 0; i < parent.cols(); ++i) {
    const Scalar c = parent.objective[static_cast<size_t>(i)];
    switch (reduced_cost_cone(parent, i)) {
      case SignCone::Zero:  // free variable: (A'y)_i = c_i
        q.con_lower[static_cast<size_t>(i)] = c;
        q.con_upper[static_cast<size_t>(i)] = c;
        break;
      case SignCone::NonNeg:  // r_i >= 0: (A'y)_i <= c_i
        q.con_lower[static_cast<size_t>(i)] = -kInf;
        q.con_upper[static_cast<size_t>(i)] = c;
        break;
      case SignCone::NonPos:  // r_i <= 0: (A'y)_i >= c_i
        q.con_lower[static_cast<size_t>(i)] = c;
        q.con_upper[static_cast<size_t>(i)] = kInf;
        break;
      case SignCone::Free:  // doubly bounded variable: no restriction
        q.con_lower[static_cast<size_t>(i)] = -kInf;
        q.con_upper[static_cast<size_t>(i)] = kInf;
        break;
    }
  }
  q.var_lower.resize(static_cast<size_t>(parent.rows()));
  q.var_upper.resize(static_cast<size_t>(parent.rows()));
  for (Index j = 0; j < parent.rows(); ++j) {
    switch (dual_cone(parent, j)) {
      case SignCone::Zero:
        q.var_lower[static_cast<size_t>(j)] = 0.0;
        q.var_upper[static_cast<size_t>(j)] = 0.0;
        break;
      case SignCone::NonNeg:
        q.var_lower[static_cast<size_t>(j)] = 0.0;
        q.var_upper[static_cast<size_t>(j)] = kInf;
        break;
      case SignCone::NonPos:
        q.var_lower[static_cast<size_t>(j)] = -kInf;
        q.var_upper[static_cast<size_t>(j)] = 0.0;
        break;
      case SignCone::Free:
        q.var_lower[static_cast<size_t>(j)] = -kInf;
        q.var_upper[static_cast<size_t>(j)] = kInf;
        break;
    }
  }
  return sub;
}

}  // namespace pdhglp
