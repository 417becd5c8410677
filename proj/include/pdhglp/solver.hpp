#pragma once

// Restarted primal-dual solve driver.
//
// The driver runs the adaptive primal-dual update on a rescaled copy of the
// problem and wakes up every check_interval accepted steps to do the
// bookkeeping that needs matrix products: termination screening,
// infeasibility certificates, restart decisions, primal-weight updates and
// feasibility polishing. Original-space residuals are derived from
// scaled-space products by componentwise division (see rescaling.hpp), so the
// in-loop screen costs no extra products; any point that screens as done is
// then re-verified with a genuine original-space computation before the
// solver commits to a status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdhglp/kernels.hpp"
#include "pdhglp/problem.hpp"
#include "pdhglp/rescaling.hpp"
#include "pdhglp/residuals.hpp"
#include "pdhglp/restarts.hpp"
#include "pdhglp/step.hpp"

namespace pdhglp {

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  IterationLimit,
  TimeLimit,
  NumericalError,
};

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NumericalError: return "numerical_error";
  }
  return "numerical_error";
}

// Snapshot handed to the iteration observer after each accepted main-loop
// step. The vectors live in the solver's working space (the rescaled problem
// when scaling is enabled) and are only valid during the call.
struct IterationRecord {
  Index iteration = 0;
  const Vector* x = nullptr;
  const Vector* y = nullptr;
  Scalar eta = 0.0;
  Scalar omega = 1.0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

struct SolverOptions {
  TerminationTolerances tolerances{};
  Index iteration_limit = 200000;
  Scalar time_limit_seconds = kInf;
  int threads = 1;
  int shards_per_thread = 4;
  bool enable_scaling = true;
  int ruiz_passes = 10;
  bool pock_chambolle = true;
  bool enable_polish = true;
  bool enable_restarts = true;
  bool detect_infeasibility = true;
  Scalar eps_ray = 1e-12;
  Index check_interval = 64;
  RestartThresholds restart_thresholds{};
  // Test and analysis knobs: freeze the step size (disables the adaptive
  // rule) and/or the primal weight (disables initialization and updates).
  std::optional<Scalar> fixed_step_size;
  std::optional<Scalar> fixed_primal_weight;
  bool logging = false;  // key=value progress lines on stderr
  IterationObserver observer;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalError;
  Vector x;              // original-space primal solution (or last iterate)
  Vector y;              // original-space dual solution
  Vector reduced_costs;  // original-space reduced costs
  ResidualSummary summary;
  std::optional<InfeasibilityCertificate> certificate;
  Index iterations = 0;         // accepted main-loop steps
  Index polish_iterations = 0;  // extra steps spent in feasibility polishing
  Index restarts = 0;
  Index step_retries = 0;
  Scalar final_step_size = 0.0;
  Scalar final_primal_weight = 1.0;
  Scalar min_step_size_limit = kInf;  // smallest admissible-step limit seen
  Scalar solve_seconds = 0.0;
  std::string termination_detail;
};

namespace solver_detail {

using Clock = std::chrono::steady_clock;

struct InnerConfig {
  TerminationTolerances tol{};
  bool feasibility_only = false;  // terminate on primal feasibility alone
  ReducedCostMode rc_mode = ReducedCostMode::Natural;
  Index iteration_budget = 0;
  Clock::time_point deadline = Clock::time_point::max();
  bool enable_restarts = true;
  bool detect_infeasibility = true;
  bool enable_polish = false;
  Scalar eps_ray = 1e-12;
  Index check_interval = 64;
  RestartThresholds th{};
  std::optional<Scalar> fixed_eta;
  bool allow_omega_updates = true;
  int threads = 1;
  int shards_per_thread = 4;
  const IterationObserver* observer = nullptr;
  bool logging = false;
  const char* tag = "main";
};

struct InnerState {
  PdhgIterate z;
  PdhgWorkspace ws;
  StepSizeControl ctrl;
  StepStats stats;
  AverageState avg;
  Scalar omega = 1.0;
  Scalar last_eta = 0.0;

  // Restart bookkeeping: reference point of the current epoch and the metric
  // history driving the decay triggers.
  Vector ref_x, ref_y;
  Scalar mu_last = kInf;
  Scalar prev_candidate_mu = kInf;
  Index k = 0;
  Index k_last_restart = 0;
  Index restarts = 0;

  // Cadence scratch, allocated once.
  Vector ax_cur, avg_x, avg_y, ax_avg, aty_avg, diff_x, diff_y, rc_a, rc_b;
  GapWorkspace gap_ws;

  // Polishing.
  Index next_polish_trigger = 100;
  Index polish_iterations = 0;

  // Filled when a status is reached: original-space solution and summary.
  Vector sol_x, sol_y, sol_r;
  ResidualSummary sol_summary;
  std::optional<InfeasibilityCertificate> certificate;
  std::string detail;

  void prepare(Index cols, Index rows, const Vector& x0, Scalar eta0, Scalar omega0) {
    z.x = x0;
    z.y.assign(static_cast<size_t>(rows), 0.0);
    z.aty.assign(static_cast<size_t>(cols), 0.0);
    ws.resize(cols, rows);
    ctrl = StepSizeControl{};
    ctrl.eta_hat = eta0;
    stats = StepStats{};
    avg.reset(cols, rows);
    omega = omega0;
    last_eta = eta0;
    ref_x = z.x;
    ref_y = z.y;
    mu_last = kInf;
    prev_candidate_mu = kInf;
    k = 0;
    k_last_restart = 0;
    restarts = 0;
    ax_cur.assign(static_cast<size_t>(rows), 0.0);
    avg_x.assign(static_cast<size_t>(cols), 0.0);
    avg_y.assign(static_cast<size_t>(rows), 0.0);
    ax_avg.assign(static_cast<size_t>(rows), 0.0);
    aty_avg.assign(static_cast<size_t>(cols), 0.0);
    diff_x.assign(static_cast<size_t>(cols), 0.0);
    diff_y.assign(static_cast<size_t>(rows), 0.0);
  }
};

// Initial primal point: the projection of the origin onto the variable box.
inline Vector initial_point(const LpProblem& p) {
  Vector x(static_cast<size_t>(p.cols()));
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = clamp(0.0, p.var_lower[i], p.var_upper[i]);
  }
  return x;
}

// Screen a scaled-space point via division-derived original residuals; on a
// pass, re-verify with a genuine original-space computation and fill the
// solution slots. Returns true only for a verified hit.
inline bool screen_and_verify(const LpProblem& scaled, const LpProblem& original,
                              const RescalingInfo& info, const InnerConfig& cfg, const Vector& xs,
                              const Vector& ys, const Vector& ax_s, const Vector& aty_s,
                              Vector& rc_scratch, ResidualSummary& screened, InnerState& st,
                              const char* which) {
  recover_reduced_costs_from(scaled, xs, aty_s, cfg.rc_mode, rc_scratch);
  screened = residuals_from_scaled(scaled, info, xs, ys, rc_scratch, ax_s, aty_s);
  const bool pass = cfg.feasibility_only
                        ? screened.primal_residual_inf <= cfg.tol.eps_primal
                        : check_termination(screened, cfg.tol);
  if (!pass) return false;
  Vector x, y;
  unscale_primal(info, xs, x);
  unscale_dual(info, ys, y);
  const Vector r = recover_reduced_costs(original, x, y, cfg.rc_mode);
  const ResidualSummary truth = kkt_residuals(original, x, y, r);
  const bool verified = cfg.feasibility_only ? truth.primal_residual_inf <= cfg.tol.eps_primal
                                             : check_termination(truth, cfg.tol);
  if (!verified) return false;
  st.sol_x = std::move(x);
  st.sol_y = std::move(y);
  st.sol_r = r;
  st.sol_summary = truth;
  st.detail = std::string("converged at the ") + which;
  return true;
}

// Fill the solution slots from the current iterate without any termination
// claim (limits, numerical error).
inline void capture_current(const LpProblem& original, const RescalingInfo& info,
                            const InnerConfig& cfg, InnerState& st) {
  unscale_primal(info, st.z.x, st.sol_x);
  unscale_dual(info, st.z.y, st.sol_y);
  st.sol_r = recover_reduced_costs(original, st.sol_x, st.sol_y, cfg.rc_mode);
  st.sol_summary = kkt_residuals(original, st.sol_x, st.sol_y, st.sol_r);
}

// Screen the scaled-space ray candidates; verify any hit against the
// original problem before accepting it. Returns the verified status.
inline std::optional<SolveStatus> detect_rays(const LpProblem& scaled, const LpProblem& original,
                                              const RescalingInfo& info, const InnerConfig& cfg,
                                              InnerState& st, bool have_avg) {
  std::vector<RayCandidate> cands;
  if (st.k > 0) {
    // z_k - z_{k-1}: the previous iterate sits in the swapped trial buffers.
    for (size_t i = 0; i < st.diff_x.size(); ++i) st.diff_x[i] = st.z.x[i] - st.ws.x_trial[i];
    for (size_t j = 0; j < st.diff_y.size(); ++j) st.diff_y[j] = st.z.y[j] - st.ws.y_trial[j];
    cands.push_back({&st.diff_x, &st.diff_y, "difference"});
  }
  cands.push_back({&st.z.x, &st.z.y, "current"});
  if (have_avg) cands.push_back({&st.avg_x, &st.avg_y, "average"});
  auto hit = check_infeasibility(scaled, cands, cfg.eps_ray);
  if (!hit.has_value()) return std::nullopt;
  if (hit->kind == CertificateKind::PrimalInfeasible) {
    Vector ray;
    unscale_dual(info, hit->ray_y, ray);
    auto verified = try_primal_infeasibility(original, ray, cfg.eps_ray, hit->source);
    if (verified.has_value()) {
      st.certificate = std::move(verified);
      st.detail = std::string("primal infeasibility certified by the ") + hit->source + " ray";
      return SolveStatus::PrimalInfeasible;
    }
  } else {
    Vector ray;
    unscale_primal(info, hit->ray_x, ray);
    auto verified = try_dual_infeasibility(original, ray, cfg.eps_ray, hit->source);
    if (verified.has_value()) {
      st.certificate = std::move(verified);
      st.detail = std::string("dual infeasibility certified by the ") + hit->source + " ray";
      return SolveStatus::DualInfeasible;
    }
  }
  return std::nullopt;
}

inline SolveStatus run_inner(const LpProblem& scaled, const LpProblem& original,
                             const RescalingInfo& info, Executor& ex, const InnerConfig& cfg,
                             InnerState& st);

// Feasibility polishing: from the restart-window average, run a primal
// feasibility solve (zero objective) and, if it lands, a dual feasibility
// solve on the adjoint subproblem, then stitch and fully re-check. The main
// state is never touched; a failed attempt simply resumes the main loop.
inline bool attempt_polish(const LpProblem& scaled, const LpProblem& original,
                           const RescalingInfo& info, Executor& ex, const InnerConfig& cfg,
                           InnerState& st) {
  const Index remaining = cfg.iteration_budget - st.k - st.polish_iterations;
  const Index budget = std::min(st.k / 8, remaining);
  if (budget <= 0) return false;

  InnerConfig sub_cfg = cfg;
  sub_cfg.feasibility_only = true;
  sub_cfg.rc_mode = ReducedCostMode::Natural;
  sub_cfg.iteration_budget = budget;
  sub_cfg.detect_infeasibility = false;
  sub_cfg.enable_polish = false;
  sub_cfg.observer = nullptr;

  // Primal feasibility polish from the window average. The subproblem keeps
  // the parent's matrix and bounds, so the parent executor is reused.
  const FeasibilitySubproblem p2s = build_primal_feasibility(scaled);
  const FeasibilitySubproblem p2o = build_primal_feasibility(original);
  InnerState st2;
  st2.prepare(scaled.cols(), scaled.rows(), st.avg_x, st.ctrl.eta_hat, st.omega);
  sub_cfg.tag = "polish_primal";
  const SolveStatus s2 = run_inner(p2s.problem, p2o.problem, info, ex, sub_cfg, st2);
  st.polish_iterations += st2.k;
  if (s2 != SolveStatus::Optimal) return false;

  // Dual feasibility polish: the parent dual average becomes the subproblem
  // primal. Swapping the parent scale vectors makes the scaled subproblem
  // exactly the rescaled original subproblem, so the subproblem's unscaled
  // solution is the parent's original-space dual. The subproblem's primal
  // tolerance is the parent's dual tolerance.
  const FeasibilitySubproblem d3s = build_dual_feasibility(scaled);
  const FeasibilitySubproblem d3o = build_dual_feasibility(original);
  RescalingInfo swapped;
  swapped.row_scale = info.col_scale;
  swapped.col_scale = info.row_scale;
  Executor ex3(d3s.problem.cols(), d3s.problem.rows(), cfg.threads, cfg.shards_per_thread);
  InnerState st3;
  st3.prepare(d3s.problem.cols(), d3s.problem.rows(), st.avg_y, st.ctrl.eta_hat, st.omega);
  sub_cfg.iteration_budget = std::min(st.k / 8, remaining - st2.k);
  if (sub_cfg.iteration_budget <= 0) return false;
  sub_cfg.tol.eps_primal = cfg.tol.eps_dual;
  sub_cfg.tag = "polish_dual";
  const SolveStatus s3 = run_inner(d3s.problem, d3o.problem, swapped, ex3, sub_cfg, st3);
  st.polish_iterations += st3.k;
  if (s3 != SolveStatus::Optimal) return false;

  const Vector& x = st2.sol_x;
  const Vector& y = st3.sol_x;
  const Vector r = recover_reduced_costs(original, x, y, ReducedCostMode::Natural);
  const ResidualSummary truth = kkt_residuals(original, x, y, r);
  if (!check_termination(truth, cfg.tol)) return false;
  st.sol_x = x;
  st.sol_y = y;
  st.sol_r = r;
  st.sol_summary = truth;
  st.detail = "converged at the polished point";
  return true;
}

inline SolveStatus run_inner(const LpProblem& scaled, const LpProblem& original,
                             const RescalingInfo& info, Executor& ex, const InnerConfig& cfg,
                             InnerState& st) {
  const Index rows = scaled.rows();
  const Index cols = scaled.cols();
  ResidualSummary screen_cur;  // latest division-derived summary for logging

  while (true) {
    const bool budget_hit = st.k >= cfg.iteration_budget;
    const bool at_cadence = budget_hit || (st.k % cfg.check_interval == 0);
    if (at_cadence) {
      const bool timed_out = Clock::now() >= cfg.deadline;
      kernels::spmv(ex.pool, ex.y_plan, scaled.a, st.z.x, st.ax_cur);
      // The step path maintains aty incrementally from difference products;
      // recompute it in full here so the tiny per-step rounding never
      // accumulates past one check interval.
      kernels::spmv_transpose(ex.pool, ex.x_plan, scaled.a, st.z.y, st.z.aty);
      const bool have_avg = !st.avg.empty();
      if (have_avg) {
        st.avg.average_into(ex, st.avg_x, st.avg_y);
        kernels::spmv(ex.pool, ex.y_plan, scaled.a, st.avg_x, st.ax_avg);
        kernels::spmv_transpose(ex.pool, ex.x_plan, scaled.a, st.avg_y, st.aty_avg);
      }

      // Termination: current iterate first, then the window average.
      if (screen_and_verify(scaled, original, info, cfg, st.z.x, st.z.y, st.ax_cur, st.z.aty,
                            st.rc_a, screen_cur, st, "current iterate")) {
        return SolveStatus::Optimal;
      }
      ResidualSummary screen_avg;
      if (have_avg &&
          screen_and_verify(scaled, original, info, cfg, st.avg_x, st.avg_y, st.ax_avg,
                            st.aty_avg, st.rc_b, screen_avg, st, "window average")) {
        return SolveStatus::Optimal;
      }

      if (cfg.detect_infeasibility) {
        auto status = detect_rays(scaled, original, info, cfg, st, have_avg);
        if (status.has_value()) {
          capture_current(original, info, cfg, st);  // last iterates for the caller
          return *status;
        }
      }

      // Polishing gate: once the window average reaches the gap tolerance.
      if (cfg.enable_polish && have_avg && st.k >= st.next_polish_trigger && !timed_out &&
          !budget_hit) {
        if (screen_avg.rel_gap <= cfg.tol.eps_rel_gap) {
          if (attempt_polish(scaled, original, info, ex, cfg, st)) return SolveStatus::Optimal;
          while (st.next_polish_trigger <= st.k) st.next_polish_trigger *= 2;
        }
      }

      // Restart decision on the better of current iterate and average.
      if (cfg.enable_restarts && st.k > st.k_last_restart) {
        const Scalar mu_cur = restart_progress_metric(scaled, ex, st.z.x, st.z.y, st.ax_cur,
                                                      st.z.aty, st.ref_x, st.ref_y, st.omega,
                                                      st.gap_ws);
        const Scalar mu_avg =
            have_avg ? restart_progress_metric(scaled, ex, st.avg_x, st.avg_y, st.ax_avg,
                                               st.aty_avg, st.ref_x, st.ref_y, st.omega,
                                               st.gap_ws)
                     : kInf;
        const bool use_current = mu_cur < mu_avg;
        const Scalar cand_mu = use_current ? mu_cur : mu_avg;
        const RestartReason reason = should_restart(cand_mu, st.mu_last, st.prev_candidate_mu,
                                                    st.k - st.k_last_restart, st.k, cfg.th);
        if (reason != RestartReason::None) {
          const Vector& cx = use_current ? st.z.x : st.avg_x;
          const Vector& cy = use_current ? st.z.y : st.avg_y;
          const Vector& cax = use_current ? st.ax_cur : st.ax_avg;
          const Vector& caty = use_current ? st.z.aty : st.aty_avg;
          if (cfg.allow_omega_updates) {
            const Scalar dx =
                std::sqrt(kernels::diff_norm_sq(ex.pool, ex.x_plan, ex.scratch, cx, st.ref_x));
            const Scalar dy =
                std::sqrt(kernels::diff_norm_sq(ex.pool, ex.y_plan, ex.scratch, cy, st.ref_y));
            st.omega = update_primal_weight(dx, dy, st.omega);
          }
          // Metric of the new epoch's reference, measured from the old one
          // under the updated weight.
          st.mu_last = restart_progress_metric(scaled, ex, cx, cy, cax, caty, st.ref_x, st.ref_y,
                                               st.omega, st.gap_ws);
          if (!use_current) {
            st.z.x = st.avg_x;
            st.z.y = st.avg_y;
            st.z.aty = st.aty_avg;
          }
          st.ref_x = st.z.x;
          st.ref_y = st.z.y;
          st.avg.reset(cols, rows);
          st.prev_candidate_mu = kInf;
          st.k_last_restart = st.k;
          ++st.restarts;
          if (cfg.logging) {
            std::fprintf(stderr, "phase=%s event=restart iter=%lld reason=%s omega=%.6e mu=%.6e\n",
                         cfg.tag, static_cast<long long>(st.k), restart_reason_name(reason),
                         st.omega, st.mu_last);
          }
        } else {
          st.prev_candidate_mu = cand_mu;
        }
      }

      if (cfg.logging) {
        std::fprintf(stderr,
                     "phase=%s iter=%lld primal_res=%.6e dual_res=%.6e rel_gap=%.6e mu=%.6e "
                     "omega=%.6e eta=%.6e restarts=%lld\n",
                     cfg.tag, static_cast<long long>(st.k), screen_cur.primal_residual_inf,
                     screen_cur.dual_residual_inf, screen_cur.rel_gap, st.mu_last, st.omega,
                     st.last_eta, static_cast<long long>(st.restarts));
      }

      if (timed_out) {
        capture_current(original, info, cfg, st);
        st.detail = "time limit reached";
        return SolveStatus::TimeLimit;
      }
      if (budget_hit) {
        capture_current(original, info, cfg, st);
        st.detail = "iteration limit reached";
        return SolveStatus::IterationLimit;
      }
    }

    // One accepted step.
    Scalar eta_used = 0.0;
    if (cfg.fixed_eta.has_value()) {
      const Scalar eta = *cfg.fixed_eta;
      pdhg_step_into(scaled, ex, st.z.x, st.z.y, st.z.aty, eta / st.omega, eta * st.omega, st.ws);
      if (!is_finite(kernels::inf_norm(ex.pool, ex.x_plan, ex.scratch, st.ws.x_trial)) ||
          !is_finite(kernels::inf_norm(ex.pool, ex.y_plan, ex.scratch, st.ws.y_trial))) {
        capture_current(original, info, cfg, st);
        st.detail = "fixed-size step produced non-finite values";
        return SolveStatus::NumericalError;
      }
      std::swap(st.z.x, st.ws.x_trial);
      std::swap(st.z.y, st.ws.y_trial);
      std::swap(st.z.aty, st.ws.aty_trial);
      ++st.stats.accepted_steps;
      eta_used = eta;
    } else {
      const StepOutcome outcome =
          adaptive_step(scaled, ex, st.z, st.omega, st.ctrl, st.ws, st.stats, eta_used);
      if (outcome == StepOutcome::NumericalError) {
        // One recovery attempt: the last good point and the window average
        // get a final termination screen before declaring failure.
        kernels::spmv(ex.pool, ex.y_plan, scaled.a, st.z.x, st.ax_cur);
        ResidualSummary tmp;
        if (screen_and_verify(scaled, original, info, cfg, st.z.x, st.z.y, st.ax_cur, st.z.aty,
                              st.rc_a, tmp, st, "current iterate after a numerical error")) {
          return SolveStatus::Optimal;
        }
        if (!st.avg.empty()) {
          st.avg.average_into(ex, st.avg_x, st.avg_y);
          kernels::spmv(ex.pool, ex.y_plan, scaled.a, st.avg_x, st.ax_avg);
          kernels::spmv_transpose(ex.pool, ex.x_plan, scaled.a, st.avg_y, st.aty_avg);
          if (screen_and_verify(scaled, original, info, cfg, st.avg_x, st.avg_y, st.ax_avg,
                                st.aty_avg, st.rc_b, tmp, st,
                                "window average after a numerical error")) {
            return SolveStatus::Optimal;
          }
        }
        capture_current(original, info, cfg, st);
        st.detail = "adaptive step failed to find a usable step size";
        return SolveStatus::NumericalError;
      }
    }
    ++st.k;
    st.last_eta = eta_used;
    st.avg.add(ex, st.z.x, st.z.y, eta_used);
    if (cfg.observer != nullptr && *cfg.observer) {
      IterationRecord rec;
      rec.iteration = st.k;
      rec.x = &st.z.x;
      rec.y = &st.z.y;
      rec.eta = eta_used;
      rec.omega = st.omega;
      (*cfg.observer)(rec);
    }
  }
}

}  // namespace solver_detail

inline SolveResult solve(const LpProblem& problem, const SolverOptions& options = {}) {
  using solver_detail::Clock;
  const auto t0 = Clock::now();
  if (auto issue = validate(problem)) {
    throw std::invalid_argument("invalid problem: " + issue->message +
                                " (index " + std::to_string(issue->index) + ")");
  }

  ScaledProblem sp;
  if (options.enable_scaling) {
    sp = apply_rescaling(problem, options.ruiz_passes, options.pock_chambolle);
  } else {
    sp.problem = problem;
    sp.info = identity_rescaling(problem.rows(), problem.cols());
  }

  Executor ex(sp.problem.cols(), sp.problem.rows(), options.threads, options.shards_per_thread);

  solver_detail::InnerConfig cfg;
  cfg.tol = options.tolerances;
  cfg.feasibility_only = false;
  cfg.rc_mode =
      options.enable_polish ? ReducedCostMode::Natural : ReducedCostMode::BoundRobust;
  cfg.iteration_budget = options.iteration_limit;
  if (is_finite(options.time_limit_seconds)) {
    cfg.deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(options.time_limit_seconds));
  }
  cfg.enable_restarts = options.enable_restarts;
  cfg.detect_infeasibility = options.detect_infeasibility;
  cfg.enable_polish = options.enable_polish;
  cfg.eps_ray = options.eps_ray;
  cfg.check_interval = options.check_interval;
  cfg.th = options.restart_thresholds;
  cfg.fixed_eta = options.fixed_step_size;
  cfg.allow_omega_updates = !options.fixed_primal_weight.has_value();
  cfg.threads = options.threads;
  cfg.shards_per_thread = options.shards_per_thread;
  cfg.observer = &options.observer;
  cfg.logging = options.logging;
  cfg.tag = "main";

  solver_detail::InnerState st;
  const Scalar eta0 = options.fixed_step_size.value_or(initial_step_size(sp.problem));
  const Scalar omega0 =
      options.fixed_primal_weight.value_or(initialize_primal_weight(sp.problem));
  st.prepare(sp.problem.cols(), sp.problem.rows(), solver_detail::initial_point(sp.problem),
             eta0, omega0);

  const SolveStatus status = solver_detail::run_inner(sp.problem, problem, sp.info, ex, cfg, st);

  SolveResult out;
  out.status = status;
  out.x = std::move(st.sol_x);
  out.y = std::move(st.sol_y);
  out.reduced_costs = std::move(st.sol_r);
  out.summary = st.sol_summary;
  out.certificate = std::move(st.certificate);
  out.iterations = st.k;
  out.polish_iterations = st.polish_iterations;
  out.restarts = st.restarts;
  out.step_retries = st.stats.retries;
  out.final_step_size = st.ctrl.eta_hat;
  out.final_primal_weight = st.omega;
  out.min_step_size_limit = st.stats.min_eta_bar;
  out.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  out.termination_detail = std::move(st.detail);
  if (options.logging) {
    std::fprintf(stderr, "phase=main event=done status=%s iters=%lld polish_iters=%lld detail=\"%s\"\n",
                 solve_status_name(out.status), static_cast<long long>(out.iterations),
                 static_cast<long long>(out.polish_iterations), out.termination_detail.c_str());
  }
  return out;
}

}  // namespace pdhglp
