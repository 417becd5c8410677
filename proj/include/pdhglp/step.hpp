#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "pdhglp/kernels.hpp"
#include "pdhglp/problem.hpp"

namespace pdhglp {

// 1 / max |A_ij|, or 1 for an all-zero matrix. A cheap spectral-norm upper
// bound proxy used to seed the adaptive step size.
inline Scalar initial_step_size(const LpProblem& p) {
  Scalar mx = 0.0;
  for (Scalar v : p.a.by_row.value) mx = std::max(mx, std::abs(v));
  return mx > 0.0 ? 1.0 / mx : 1.0;
}

// Current point plus the matching transpose product. aty == A' * y is an
// invariant maintained by every accepted step and every restart.
struct PdhgIterate {
  Vector x;
  Vector y;
  Vector aty;
};

// Trial buffers for one step attempt, preallocated once per solve. After an
// accepted step the trial vectors hold the previous iterate (swap), which the
// driver uses for the iterate-difference infeasibility candidate, and a_ext
// still holds A(2x' - x) of the accepting trial. aty_diff holds A'(y' - y):
// the product is taken on the difference vector so that its value stays
// accurate when the steps become small — differencing two independently
// rounded full products of nearly equal magnitude would lose all significant
// digits exactly where the step-size control needs them.
struct PdhgWorkspace {
  Vector x_trial;
  Vector y_trial;
  Vector aty_trial;
  Vector a_ext;
  Vector y_diff;
  Vector aty_diff;

  void resize(Index cols, Index rows) {
    x_trial.assign(static_cast<size_t>(cols), 0.0);
    aty_trial.assign(static_cast<size_t>(cols), 0.0);
    aty_diff.assign(static_cast<size_t>(cols), 0.0);
    y_trial.assign(static_cast<size_t>(rows), 0.0);
    a_ext.assign(static_cast<size_t>(rows), 0.0);
    y_diff.assign(static_cast<size_t>(rows), 0.0);
  }
};

// One primal-dual update at fixed step sizes tau (primal) and sigma (dual):
//   x' = proj_box(x - tau (c - A'y))
//   y' = yhat - sigma proj_{[-u_c, -l_c]}(yhat / sigma),  yhat = y - sigma A(2x' - x)
// The dual form keeps y' inside its sign cone exactly: coordinates of free
// constraints come out exactly zero. Two matrix products per call: A(2x'-x)
// here and A'y' for the result invariant.
inline void pdhg_step_into(const LpProblem& p, Executor& ex, const Vector& x, const Vector& y,
                           const Vector& aty, Scalar tau, Scalar sigma, PdhgWorkspace& ws) {
  kernels::for_each(ex.pool, ex.x_plan, [&](Index i) {
    const size_t ii = static_cast<size_t>(i);
    const Scalar step = x[ii] - tau * (p.objective[ii] - aty[ii]);
    ws.x_trial[ii] = clamp(step, p.var_lower[ii], p.var_upper[ii]);
  });
  // a_ext = A (2x' - x), reusing y_trial-independent storage.
  {
    // Extrapolated point lives only inside this product: fuse 2x'-x into the
    // row traversal to avoid another n-vector.
    kernels::for_each(ex.pool, ex.y_plan, [&](Index r) {
      Scalar acc = 0.0;
      for (Index k = p.a.by_row.start[static_cast<size_t>(r)];
           k < p.a.by_row.start[static_cast<size_t>(r) + 1]; ++k) {
        const size_t c = static_cast<size_t>(p.a.by_row.index[static_cast<size_t>(k)]);
        acc += p.a.by_row.value[static_cast<size_t>(k)] * (2.0 * ws.x_trial[c] - x[c]);
      }
      ws.a_ext[static_cast<size_t>(r)] = acc;
    });
  }
  kernels::for_each(ex.pool, ex.y_plan, [&](Index j) {
    const size_t jj = static_cast<size_t>(j);
    const Scalar yhat = y[jj] - sigma * ws.a_ext[jj];
    const Scalar proj = clamp(yhat / sigma, -p.con_upper[jj], -p.con_lower[jj]);
    ws.y_trial[jj] = yhat - sigma * proj;
    ws.y_diff[jj] = ws.y_trial[jj] - y[jj];
  });
  // Transpose product on the difference, then the trial invariant
  // incrementally; this is the call's second (and last) matrix product.
  kernels::spmv_transpose(ex.pool, ex.x_plan, p.a, ws.y_diff, ws.aty_diff);
  kernels::for_each(ex.pool, ex.x_plan, [&](Index i) {
    const size_t ii = static_cast<size_t>(i);
    ws.aty_trial[ii] = aty[ii] + ws.aty_diff[ii];
  });
}

// Test-facing single step: z' from z at joint step size eta and weight omega
// (tau = eta/omega, sigma = eta*omega). Returns nullopt when any output entry
// is NaN or infinite.
inline std::optional<PrimalDualIterate> pdhg_step(const LpProblem& p, const PrimalDualIterate& z,
                                                  Scalar omega, Scalar eta) {
  Executor ex(p.cols(), p.rows(), 1);
  PdhgWorkspace ws;
  ws.resize(p.cols(), p.rows());
  Vector aty(static_cast<size_t>(p.cols()));
  kernels::spmv_transpose(ex.pool, ex.x_plan, p.a, z.y, aty);
  pdhg_step_into(p, ex, z.x, z.y, aty, eta / omega, eta * omega, ws);
  for (Scalar v : ws.x_trial) {
    if (!is_finite(v)) return std::nullopt;
  }
  for (Scalar v : ws.y_trial) {
    if (!is_finite(v)) return std::nullopt;
  }
  return PrimalDualIterate{ws.x_trial, ws.y_trial};
}

// Largest step size the movement/curvature inequality admits for this trial:
// |dz|_w^2 / (2 |dy'A dx|), or +inf when the interaction term vanishes. The
// magnitude of the interaction term is what matters: the proximal metric of
// the update cross-couples dy and dx, so a large interaction of either sign
// means the trial left the locally verifiable stability region. (Using the
// signed value accepts arbitrarily large steps in oscillation modes, where
// the interaction is persistently negative, and the step size then grows
// without bound.) By the Cauchy-Schwarz inequality this limit is never below
// 1/|A|_2.
inline Scalar step_size_limit(Scalar movement, Scalar curvature) {
  const Scalar denom = 2.0 * std::abs(curvature);
  if (!(denom > 0.0)) return kInf;
  return movement / denom;
}

// Next trial step size: min of a reduction from the limit and a mild growth
// from the current value. k is the global iteration counter; the first
// iteration evaluates the schedule at k = 1 so the reduction factor is
// nonzero.
inline Scalar next_step_size(Scalar eta_bar, Scalar eta, Index k) {
  const Scalar kk = static_cast<Scalar>(k < 1 ? 1 : k) + 1.0;
  const Scalar down = (1.0 - std::pow(kk, -0.3)) * eta_bar;
  const Scalar up = (1.0 + std::pow(kk, -0.6)) * eta;
  return std::min(down, up);
}

struct StepSizeControl {
  Scalar eta_hat = 1.0;   // next trial step size
  Index k = 0;            // accepted iterations so far (global counter)
  int max_retries = 60;
};

struct StepStats {
  Index accepted_steps = 0;
  Index retries = 0;
  Scalar min_eta_bar = kInf;  // smallest finite limit observed
};

enum class StepOutcome { Accepted, NumericalError };

// One accepted iteration of the step-size-adaptive update. Rejected trials
// never touch the accepted state; on acceptance the iterate swaps with the
// trial buffers (previous iterate remains in the workspace) and eta_used
// receives the step size actually taken.
inline StepOutcome adaptive_step(const LpProblem& p, Executor& ex, PdhgIterate& z, Scalar omega,
                                 StepSizeControl& ctrl, PdhgWorkspace& ws, StepStats& stats,
                                 Scalar& eta_used) {
  Scalar eta = ctrl.eta_hat;
  for (int attempt = 0; attempt <= ctrl.max_retries; ++attempt) {
    if (!(eta > 0.0) || !is_finite(eta)) return StepOutcome::NumericalError;
    pdhg_step_into(p, ex, z.x, z.y, z.aty, eta / omega, eta * omega, ws);
    const Scalar dx2 = kernels::diff_norm_sq(ex.pool, ex.x_plan, ex.scratch, ws.x_trial, z.x);
    const Scalar dy2 = kernels::diff_norm_sq(ex.pool, ex.y_plan, ex.scratch, ws.y_trial, z.y);
    const Scalar movement = omega * dx2 + dy2 / omega;
    // Interaction term from the difference product A'(y'-y): accurate for
    // small steps, where differencing full products would cancel away.
    const Scalar curvature =
        kernels::dot_with_diff(ex.pool, ex.x_plan, ex.scratch, ws.aty_diff, ws.x_trial, z.x);
    if (!is_finite(movement) || !is_finite(curvature)) return StepOutcome::NumericalError;
    const Scalar eta_bar = step_size_limit(movement, curvature);
    if (is_finite(eta_bar)) stats.min_eta_bar = std::min(stats.min_eta_bar, eta_bar);
    const Scalar eta_next = next_step_size(eta_bar, eta, ctrl.k);
    if (eta <= eta_bar) {
      std::swap(z.x, ws.x_trial);
      std::swap(z.y, ws.y_trial);
      std::swap(z.aty, ws.aty_trial);
      ctrl.eta_hat = eta_next;
      ctrl.k += 1;
      ++stats.accepted_steps;
      eta_used = eta;
      return StepOutcome::Accepted;
    }
    ++stats.retries;
    eta = eta_next;
  }
  return StepOutcome::NumericalError;
}

// Step-size-weighted running average of iterates since the last restart.
struct AverageState {
  Vector sum_x;
  Vector sum_y;
  Scalar weight = 0.0;
  Index count = 0;

  void reset(Index cols, Index rows) {
    sum_x.assign(static_cast<size_t>(cols), 0.0);
    sum_y.assign(static_cast<size_t>(rows), 0.0);
    weight = 0.0;
    count = 0;
  }

  void add(Executor& ex, const Vector& x, const Vector& y, Scalar eta) {
    kernels::for_each(ex.pool, ex.x_plan,
                      [&](Index i) { sum_x[static_cast<size_t>(i)] += eta * x[static_cast<size_t>(i)]; });
    kernels::for_each(ex.pool, ex.y_plan,
                      [&](Index j) { sum_y[static_cast<size_t>(j)] += eta * y[static_cast<size_t>(j)]; });
    weight += eta;
    count += 1;
  }

  bool empty() const { return count == 0; }

  // Pre: not empty (weights are positive step sizes, so weight > 0).
  void average_into(Executor& ex, Vector& x, Vector& y) const {
    const Scalar inv = 1.0 / weight;
    kernels::for_each(ex.pool, ex.x_plan,
                      [&](Index i) { x[static_cast<size_t>(i)] = inv * sum_x[static_cast<size_t>(i)]; });
    kernels::for_each(ex.pool, ex.y_plan,
                      [&](Index j) { y[static_cast<size_t>(j)] = inv * sum_y[static_cast<size_t>(j)]; });
  }
};

}  // namespace pdhglp
