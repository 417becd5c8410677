#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdhglp/kernels.hpp"
#include "pdhglp/problem.hpp"

namespace pdhglp {

// --- Normalized duality gap ---------------------------------------------
//
// rho_r(z) = (1/r) * max { L(x, yh) - L(xh, y) : zh in Z, |zh - z|_w <= r }.
//
// The maximand is separable and concave, so the ball-constrained maximum is
// found through its Lagrange multiplier lam > 0: each coordinate's maximizer
// is a clamp whose displacement is either constant or proportional to 1/lam.
// The squared displacement norm phi(lam) = C + B/lam^2 is piecewise in lam
// with at most one breakpoint per primal coordinate and two per dual
// coordinate, continuous and nonincreasing, so the lam with phi(lam) = r^2
// is found exactly by a descending sweep over sorted breakpoints.
//
// Candidate coordinates at multiplier lam (g = A'y - c, nu = lam / w):
//   xh_i = clamp(x_i + g_i / (lam w), l_v_i, u_v_i)
//   yh_j = y_j - (1/nu) clamp(nu y_j, (Ax)_j - u_c_j, (Ax)_j - l_c_j)
// yh lands in the multiplier sign cone exactly, so the penalty terms of the
// gap value stay finite for z in Z.

namespace gap_detail {

struct Event {
  Scalar lambda;
  Scalar d_const;   // change of C when lam decreases across lambda
  Scalar d_inverse; // change of B
};

}  // namespace gap_detail

// Scratch reused across evaluations; cleared, never shrunk.
struct GapWorkspace {
  std::vector<gap_detail::Event> events;
  Vector xh;
  Vector yh;
};

namespace gap_detail {

// Gap value at the assembled candidate; needs only the cached products.
inline Scalar gap_value_at(const LpProblem& p, const Vector& x, const Vector& y, const Vector& ax,
                           const Vector& aty, const Vector& xh, const Vector& yh) {
  Scalar value = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    value += p.objective[i] * (x[i] - xh[i]) + aty[i] * xh[i];
  }
  for (size_t j = 0; j < y.size(); ++j) {
    value -= yh[j] * ax[j];
    // p(yh; -u_c, -l_c) subtracted, p(y; -u_c, -l_c) added.
    if (yh[j] > 0.0) {
      value -= mul_zero_inf(-p.con_lower[j], yh[j]);
    } else if (yh[j] < 0.0) {
      value -= mul_zero_inf(-p.con_upper[j], yh[j]);
    }
    if (y[j] > 0.0) {
      value += mul_zero_inf(-p.con_lower[j], y[j]);
    } else if (y[j] < 0.0) {
      value += mul_zero_inf(-p.con_upper[j], y[j]);
    }
  }
  return value;
}

inline void assemble_candidate(const LpProblem& p, const Vector& x, const Vector& y,
                               const Vector& ax, const Vector& aty, Scalar omega, Scalar lambda,
                               Vector& xh, Vector& yh) {
  xh.resize(x.size());
  yh.resize(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const Scalar g = aty[i] - p.objective[i];
    xh[i] = clamp(x[i] + g / (lambda * omega), p.var_lower[i], p.var_upper[i]);
  }
  const Scalar nu = lambda / omega;
  for (size_t j = 0; j < y.size(); ++j) {
    const Scalar bm = ax[j] - p.con_upper[j];
    const Scalar bp = ax[j] - p.con_lower[j];
    const Scalar t = nu * y[j];
    Scalar v;
    if (t >= bp) {
      v = y[j] - bp / nu;
    } else if (t <= bm) {
      v = y[j] - bm / nu;
    } else {
      // Interior of the clamp: the exact solution is zero. Writing the
      // formula y - t/nu here would leave roundoff dust whose sign can charge
      // an infinite penalty on a one-sided row.
      v = 0.0;
    }
    // Roundoff in the boundary branches must not escape the sign cone either.
    yh[j] = cone_project(v, dual_cone(p, static_cast<Index>(j)));
  }
}

}  // namespace gap_detail

// Exact normalized duality gap at radius r in the omega-weighted norm.
// Pre: z in Z, ax = A x, aty = A' y. Returns 0 for r <= 0.
inline Scalar normalized_duality_gap(const LpProblem& p, const Vector& x, const Vector& y,
                                     const Vector& ax, const Vector& aty, Scalar omega, Scalar r,
                                     GapWorkspace& ws) {
  using gap_detail::Event;
  if (!(r > 0.0)) return 0.0;
  const Scalar r2 = r * r;
  ws.events.clear();
  Scalar c_inf = 0.0;  // constant displacement mass in the lam -> inf state
  Scalar b_inf = 0.0;  // 1/lam^2 displacement mass in the lam -> inf state

  for (size_t i = 0; i < x.size(); ++i) {
    const Scalar g = aty[i] - p.objective[i];
    if (g == 0.0) continue;
    const Scalar off = (g > 0.0 ? p.var_upper[i] : p.var_lower[i]) - x[i];
    if (off == 0.0) continue;  // pinned at the bound the gradient pushes into
    b_inf += g * g / omega;
    if (is_finite(off)) {
      // Below lambda = g / (w off) the coordinate saturates at the bound.
      ws.events.push_back({g / (omega * off), omega * off * off, -g * g / omega});
    }
  }

  for (size_t j = 0; j < y.size(); ++j) {
    const Scalar yj = y[j];
    const Scalar bm = ax[j] - p.con_upper[j];  // lower clamp edge
    const Scalar bp = ax[j] - p.con_lower[j];  // upper clamp edge
    const Scalar interior_mass = yj * yj / omega;
    if (yj > 0.0) {
      if (bp <= 0.0) {
        // nu yj > 0 >= bp for every lam: clamped at bp throughout.
        if (bp < 0.0) b_inf += omega * bp * bp;
        continue;
      }
      if (is_finite(bp)) {
        b_inf += omega * bp * bp;
        ws.events.push_back({omega * bp / yj, interior_mass, -omega * bp * bp});
      } else {
        c_inf += interior_mass;  // defensive: y outside its cone
      }
      if (bm > 0.0) {
        ws.events.push_back({omega * bm / yj, -interior_mass, omega * bm * bm});
      }
    } else if (yj < 0.0) {
      if (bm >= 0.0) {
        if (bm > 0.0) b_inf += omega * bm * bm;
        continue;
      }
      if (is_finite(bm)) {
        b_inf += omega * bm * bm;
        ws.events.push_back({omega * bm / yj, interior_mass, -omega * bm * bm});
      } else {
        c_inf += interior_mass;
      }
      if (bp < 0.0) {
        ws.events.push_back({omega * bp / yj, -interior_mass, omega * bp * bp});
      }
    } else {
      if (bm > 0.0) {
        b_inf += omega * bm * bm;
      } else if (bp < 0.0) {
        b_inf += omega * bp * bp;
      }
    }
  }

  std::sort(ws.events.begin(), ws.events.end(),
            [](const Event& a, const Event& b) { return a.lambda > b.lambda; });

  Scalar c_sum = c_inf;
  Scalar b_sum = b_inf;
  Scalar hi = kInf;
  Scalar lambda_star = -1.0;
  size_t idx = 0;
  while (idx < ws.events.size()) {
    const Scalar lam = ws.events[idx].lambda;
    const Scalar phi_lo = c_sum + b_sum / (lam * lam);
    if (phi_lo >= r2) {
      // Crossing inside [lam, hi].
      if (b_sum > 0.0 && r2 > c_sum) {
        lambda_star = std::sqrt(b_sum / (r2 - c_sum));
      } else {
        lambda_star = lam;  // flat segment at exactly r2 (or defensive corner)
      }
      lambda_star = clamp(lambda_star, lam, hi);
      break;
    }
    while (idx < ws.events.size() && ws.events[idx].lambda == lam) {
      c_sum += ws.events[idx].d_const;
      b_sum += ws.events[idx].d_inverse;
      ++idx;
    }
    hi = lam;
  }
  if (lambda_star < 0.0) {
    // Last segment (0, hi].
    if (b_sum > 0.0 && r2 > c_sum) {
      lambda_star = std::sqrt(b_sum / (r2 - c_sum));
      lambda_star = std::min(lambda_star, hi);
    } else if (b_sum > 0.0) {
      lambda_star = hi;  // defensive: constant mass already at r2
    } else {
      // Unconstrained maximum strictly inside the ball; any lam in the
      // segment assembles the same candidate.
      lambda_star = is_finite(hi) ? hi / 2.0 : 1.0;
    }
  }
  if (!is_finite(lambda_star)) lambda_star = 1e300;
  if (lambda_star <= 0.0) lambda_star = 1e-300;

  gap_detail::assemble_candidate(p, x, y, ax, aty, omega, lambda_star, ws.xh, ws.yh);
  const Scalar value = gap_detail::gap_value_at(p, x, y, ax, aty, ws.xh, ws.yh);
  if (!(value > 0.0)) return 0.0;  // saddle point (or roundoff slightly below)
  return value / r;
}

// Gap of z at radius |z - z_ref|_w: the restart progress metric.
inline Scalar restart_progress_metric(const LpProblem& p, Executor& ex, const Vector& x,
                                      const Vector& y, const Vector& ax, const Vector& aty,
                                      const Vector& ref_x, const Vector& ref_y, Scalar omega,
                                      GapWorkspace& ws) {
  const Scalar dx2 = kernels::diff_norm_sq(ex.pool, ex.x_plan, ex.scratch, x, ref_x);
  const Scalar dy2 = kernels::diff_norm_sq(ex.pool, ex.y_plan, ex.scratch, y, ref_y);
  const Scalar radius = std::sqrt(omega * dx2 + dy2 / omega);
  return normalized_duality_gap(p, x, y, ax, aty, omega, radius, ws);
}

// --- Restart policy -------------------------------------------------------

struct RestartThresholds {
  Scalar sufficient = 0.1;  // trigger on decay to this fraction
  Scalar necessary = 0.9;   // decay floor that arms the stall trigger
  Scalar artificial = 0.5;  // restart when t >= artificial * k
};

enum class RestartReason { None, Sufficient, Stalled, Artificial };

inline const char* restart_reason_name(RestartReason r) {
  switch (r) {
    case RestartReason::None: return "none";
    case RestartReason::Sufficient: return "sufficient";
    case RestartReason::Stalled: return "stalled";
    case RestartReason::Artificial: return "artificial";
  }
  return "none";
}

// Decide whether to restart given the chosen candidate's metric. mu_last is
// the metric at the last restart point (+inf before the first restart, which
// disables the decay triggers), prev_mu the candidate metric from the
// previous evaluation in this epoch (+inf right after a restart).
inline RestartReason should_restart(Scalar candidate_mu, Scalar mu_last, Scalar prev_mu,
                                    Index since_restart, Index total_iterations,
                                    const RestartThresholds& th) {
  if (is_finite(mu_last)) {
    if (candidate_mu <= th.sufficient * mu_last) return RestartReason::Sufficient;
    if (candidate_mu <= th.necessary * mu_last && candidate_mu > prev_mu) {
      return RestartReason::Stalled;
    }
  }
  if (static_cast<Scalar>(since_restart) >=
      th.artificial * static_cast<Scalar>(total_iterations)) {
    return RestartReason::Artificial;
  }
  return RestartReason::None;
}

// --- Primal weight policy -------------------------------------------------

// w0 = |c|_2 / |combined constraint bounds|_2 when both are meaningfully
// nonzero, else 1. The combined bound vector takes, per row, the largest
// finite magnitude among the two bounds (0 if none).
inline Scalar initialize_primal_weight(const LpProblem& p, Scalar eps_zero = 1e-12) {
  Scalar c2 = 0.0;
  for (Scalar v : p.objective) c2 += v * v;
  Scalar b2 = 0.0;
  for (size_t j = 0; j < p.con_lower.size(); ++j) {
    const Scalar lo = p.con_lower[j];
    const Scalar hi = p.con_upper[j];
    Scalar mag = 0.0;
    if (is_finite(lo)) mag = std::max(mag, std::abs(lo));
    if (is_finite(hi)) mag = std::max(mag, std::abs(hi));
    b2 += mag * mag;
  }
  const Scalar nc = std::sqrt(c2);
  const Scalar nb = std::sqrt(b2);
  if (nc > eps_zero && nb > eps_zero) return nc / nb;
  return 1.0;
}

// Log-space smoothing toward the observed dual/primal movement ratio. Stays
// put when either movement is negligible.
inline Scalar update_primal_weight(Scalar delta_x_norm, Scalar delta_y_norm, Scalar omega_prev,
                                   Scalar theta = 0.5, Scalar eps_zero = 1e-12) {
  if (!(delta_x_norm > eps_zero) || !(delta_y_norm > eps_zero)) return omega_prev;
  return std::exp(theta * std::log(delta_y_norm / delta_x_norm) +
                  (1.0 - theta) * std::log(omega_prev));
}

}  // namespace pdhglp
