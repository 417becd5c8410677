#pragma once

#include <cmath>
#include <utility>

#include "pdhglp/problem.hpp"

namespace pdhglp {

// Cumulative diagonal scaling applied to a problem: the scaled matrix is
// diag(row_scale) * A * diag(col_scale) and the data transforms with it so
// the scaled problem is equivalent (objective values equal, feasibility
// preserved). Scales are strictly positive and finite.
//
//   scaled c      = col_scale .* c
//   scaled l_c,u_c = row_scale .* (l_c,u_c)
//   scaled l_v,u_v = (l_v,u_v) ./ col_scale
//   original x    = col_scale .* scaled x
//   original y    = row_scale .* scaled y
//   original r    = scaled r ./ col_scale
//
// Per-row / per-column residual distances transform exactly:
//   original primal dist_j = scaled dist_j / row_scale_j
//   original dual   dist_i = scaled dist_i / col_scale_i
struct RescalingInfo {
  Vector row_scale;
  Vector col_scale;
};

inline RescalingInfo identity_rescaling(Index rows, Index cols) {
  return {Vector(static_cast<size_t>(rows), 1.0), Vector(static_cast<size_t>(cols), 1.0)};
}

struct PassFactors {
  Vector row;  // divisors applied to each row
  Vector col;  // divisors applied to each column
};

namespace detail {

// Divides matrix entries (both layouts), bounds, and objective by the given
// per-row / per-column factors and folds them into the cumulative info.
// Infinite bounds stay infinite because factors are positive and finite.
inline void apply_factors(LpProblem& p, RescalingInfo& info, const PassFactors& f) {
  auto& row_layout = p.a.by_row;
  for (Index r = 0; r < p.a.rows; ++r) {
    for (Index k = row_layout.start[static_cast<size_t>(r)];
         k < row_layout.start[static_cast<size_t>(r) + 1]; ++k) {
      row_layout.value[static_cast<size_t>(k)] /=
          f.row[static_cast<size_t>(r)] *
          f.col[static_cast<size_t>(row_layout.index[static_cast<size_t>(k)])];
    }
  }
  auto& col_layout = p.a.by_col;
  for (Index c = 0; c < p.a.cols; ++c) {
    for (Index k = col_layout.start[static_cast<size_t>(c)];
         k < col_layout.start[static_cast<size_t>(c) + 1]; ++k) {
      col_layout.value[static_cast<size_t>(k)] /=
          f.col[static_cast<size_t>(c)] *
          f.row[static_cast<size_t>(col_layout.index[static_cast<size_t>(k)])];
    }
  }
  for (Index j = 0; j < p.a.rows; ++j) {
    p.con_lower[static_cast<size_t>(j)] /= f.row[static_cast<size_t>(j)];
    p.con_upper[static_cast<size_t>(j)] /= f.row[static_cast<size_t>(j)];
    info.row_scale[static_cast<size_t>(j)] /= f.row[static_cast<size_t>(j)];
  }
  for (Index i = 0; i < p.a.cols; ++i) {
    p.objective[static_cast<size_t>(i)] /= f.col[static_cast<size_t>(i)];
    p.var_lower[static_cast<size_t>(i)] *= f.col[static_cast<size_t>(i)];
    p.var_upper[static_cast<size_t>(i)] *= f.col[static_cast<size_t>(i)];
    info.col_scale[static_cast<size_t>(i)] /= f.col[static_cast<size_t>(i)];
  }
}

}  // namespace detail

// One equilibration pass dividing rows and columns by the square roots of
// their infinity norms. Empty (all-zero) rows and columns get factor 1.
inline PassFactors ruiz_pass(LpProblem& p, RescalingInfo& info) {
  PassFactors f;
  f.row.assign(static_cast<size_t>(p.a.rows), 0.0);
  f.col.assign(static_cast<size_t>(p.a.cols), 0.0);
  for (Index r = 0; r < p.a.rows; ++r) {
    Scalar mx = 0.0;
    for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
         k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      mx = std::max(mx, std::abs(p.a.by_row.value[static_cast<size_t>(k)]));
    }
    f.row[static_cast<size_t>(r)] = mx > 0.0 ? std::sqrt(mx) : 1.0;
  }
  for (Index c = 0; c < p.a.cols; ++c) {
    Scalar mx = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      mx = std::max(mx, std::abs(p.a.by_col.value[static_cast<size_t>(k)]));
    }
    f.col[static_cast<size_t>(c)] = mx > 0.0 ? std::sqrt(mx) : 1.0;
  }
  detail::apply_factors(p, info, f);
  return f;
}

// One pass dividing rows and columns by the square roots of their 1-norms.
inline PassFactors pock_chambolle_pass(LpProblem& p, RescalingInfo& info) {
  PassFactors f;
  f.row.assign(static_cast<size_t>(p.a.rows), 0.0);
  f.col.assign(static_cast<size_t>(p.a.cols), 0.0);
  for (Index r = 0; r < p.a.rows; ++r) {
    Scalar sum = 0.0;
    for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
         k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
      sum += std::abs(p.a.by_row.value[static_cast<size_t>(k)]);
    }
    f.row[static_cast<size_t>(r)] = sum > 0.0 ? std::sqrt(sum) : 1.0;
  }
  for (Index c = 0; c < p.a.cols; ++c) {
    Scalar sum = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      sum += std::abs(p.a.by_col.value[static_cast<size_t>(k)]);
    }
    f.col[static_cast<size_t>(c)] = sum > 0.0 ? std::sqrt(sum) : 1.0;
  }
  detail::apply_factors(p, info, f);
  return f;
}

struct ScaledProblem {
  LpProblem problem;
  RescalingInfo info;
};

// Standard preconditioning pipeline: a fixed number of equilibration passes
// (default 10) followed by one 1-norm pass. The matrix is rescaled in place
// between passes; info accumulates the combined diagonals.
inline ScaledProblem apply_rescaling(const LpProblem& original, int ruiz_passes = 10,
                                     bool pock_chambolle = true) {
  ScaledProblem out{original, identity_rescaling(original.rows(), original.cols())};
  for (int pass = 0; pass < ruiz_passes; ++pass) ruiz_pass(out.problem, out.info);
  if (pock_chambolle) pock_chambolle_pass(out.problem, out.info);
  return out;
}

inline void unscale_primal(const RescalingInfo& info, const Vector& scaled_x, Vector& x) {
  x.resize(scaled_x.size());
  for (size_t i = 0; i < scaled_x.size(); ++i) x[i] = info.col_scale[i] * scaled_x[i];
}

inline void unscale_dual(const RescalingInfo& info, const Vector& scaled_y, Vector& y) {
  y.resize(scaled_y.size());
  for (size_t j = 0; j < scaled_y.size(); ++j) y[j] = info.row_scale[j] * scaled_y[j];
}

inline void unscale_reduced_costs(const RescalingInfo& info, const Vector& scaled_r, Vector& r) {
  r.resize(scaled_r.size());
  for (size_t i = 0; i < scaled_r.size(); ++i) r[i] = scaled_r[i] / info.col_scale[i];
}

}  // namespace pdhglp
