#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "pdhglp/kernels.hpp"
#include "pdhglp/problem.hpp"
#include "pdhglp/rescaling.hpp"

namespace pdhglp {

// Recession direction cone of an interval: which ray directions keep a point
// inside. Opposite classification from the multiplier cone.
inline SignCone recession_cone(Scalar lo, Scalar hi) {
  const bool lo_finite = lo > -kInf;
  const bool hi_finite = hi < kInf;
  if (lo_finite && hi_finite) return SignCone::Zero;
  if (lo_finite) return SignCone::NonNeg;
  if (hi_finite) return SignCone::NonPos;
  return SignCone::Free;
}

enum class ReducedCostMode { Natural, BoundRobust };

// Natural: project c - A'y onto the valid sign cone per variable.
// BoundRobust: keep the value only when the matching bound is within |x_i| of
// x_i (so huge bounds never absorb spurious reduced costs), else zero.
inline void recover_reduced_costs_from(const LpProblem& p, const Vector& x, const Vector& aty,
                                       ReducedCostMode mode, Vector& r) {
  const size_t n = x.size();
  r.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Scalar v = p.objective[i] - aty[i];
    if (mode == ReducedCostMode::Natural) {
      r[i] = cone_project(v, cone_of_bounds(p.var_lower[i], p.var_upper[i]));
    } else {
      if (v > 0.0 && x[i] - p.var_lower[i] <= std::abs(x[i])) {
        r[i] = v;
      } else if (v < 0.0 && p.var_upper[i] - x[i] <= std::abs(x[i])) {
        r[i] = v;
      } else {
        r[i] = 0.0;
      }
    }
  }
}

inline Vector recover_reduced_costs(const LpProblem& p, const Vector& x, const Vector& y,
                                    ReducedCostMode mode) {
  Vector aty(x.size(), 0.0);
  for (Index c = 0; c < p.cols(); ++c) {
    Scalar acc = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      acc += p.a.by_col.value[static_cast<size_t>(k)] *
             y[static_cast<size_t>(p.a.by_col.index[static_cast<size_t>(k)])];
    }
    aty[static_cast<size_t>(c)] = acc;
  }
  Vector r;
  recover_reduced_costs_from(p, x, aty, mode, r);
  return r;
}

struct ResidualSummary {
  Scalar primal_residual_inf = kInf;  // constraint interval + variable box distances
  Scalar dual_residual_inf = kInf;    // |(c - A'y) - r|_inf
  Scalar primal_objective = 0.0;
  Scalar dual_objective = 0.0;
  Scalar abs_gap = kInf;
  Scalar rel_gap = kInf;
};

// Dual objective -p(-y; l_c, u_c) - p(-r; l_v, u_v); -inf when a sign
// violation fires an infinite penalty.
inline Scalar dual_objective_value(const LpProblem& p, const Vector& y, const Vector& r) {
  Scalar pen = 0.0;
  for (size_t j = 0; j < y.size(); ++j) {
    const Scalar v = -y[j];
    if (v > 0.0) {
      pen += mul_zero_inf(p.con_upper[j], v);
    } else if (v < 0.0) {
      pen += mul_zero_inf(p.con_lower[j], v);
    }
  }
  for (size_t i = 0; i < r.size(); ++i) {
    const Scalar v = -r[i];
    if (v > 0.0) {
      pen += mul_zero_inf(p.var_upper[i], v);
    } else if (v < 0.0) {
      pen += mul_zero_inf(p.var_lower[i], v);
    }
  }
  return -pen;
}

inline ResidualSummary finish_summary(Scalar primal_inf, Scalar dual_inf, Scalar pobj,
                                      Scalar dobj) {
  ResidualSummary s;
  s.primal_residual_inf = primal_inf;
  s.dual_residual_inf = dual_inf;
  s.primal_objective = pobj;
  s.dual_objective = dobj;
  if (!is_finite(dobj)) {
    s.abs_gap = kInf;
    s.rel_gap = kInf;
    return s;
  }
  s.abs_gap = std::abs(pobj - dobj);
  const Scalar denom = std::max(std::abs(pobj), std::abs(dobj));
  s.rel_gap = s.abs_gap == 0.0 ? 0.0 : s.abs_gap / denom;
  return s;
}

// Full KKT summary from precomputed products.
inline ResidualSummary kkt_residuals_from(const LpProblem& p, const Vector& x, const Vector& y,
                                          const Vector& r, const Vector& ax, const Vector& aty) {
  Scalar primal_inf = 0.0;
  for (size_t j = 0; j < y.size(); ++j) {
    primal_inf = std::max(primal_inf, interval_distance(ax[j], p.con_lower[j], p.con_upper[j]));
  }
  for (size_t i = 0; i < x.size(); ++i) {
    primal_inf = std::max(primal_inf, interval_distance(x[i], p.var_lower[i], p.var_upper[i]));
  }
  Scalar dual_inf = 0.0;
  Scalar pobj = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    dual_inf = std::max(dual_inf, std::abs(p.objective[i] - aty[i] - r[i]));
    pobj += p.objective[i] * x[i];
  }
  return finish_summary(primal_inf, dual_inf, pobj, dual_objective_value(p, y, r));
}

inline ResidualSummary kkt_residuals(const LpProblem& p, const Vector& x, const Vector& y,
                                     const Vector& r) {
  Vector ax(static_cast<size_t>(p.rows()), 0.0);
  for (Index row = 0; row < p.rows(); ++row) {
    Scalar acc = 0.0;
    for (Index k = p.a.by_row.start[static_cast<size_t>(row)];
         k < p.a.by_row.start[static_cast<size_t>(row) + 1]; ++k) {
      acc += p.a.by_row.value[static_cast<size_t>(k)] *
             x[static_cast<size_t>(p.a.by_row.index[static_cast<size_t>(k)])];
    }
    ax[static_cast<size_t>(row)] = acc;
  }
  Vector aty(static_cast<size_t>(p.cols()), 0.0);
  for (Index c = 0; c < p.cols(); ++c) {
    Scalar acc = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      acc += p.a.by_col.value[static_cast<size_t>(k)] *
             y[static_cast<size_t>(p.a.by_col.index[static_cast<size_t>(k)])];
    }
    aty[static_cast<size_t>(c)] = acc;
  }
  return kkt_residuals_from(p, x, y, r, ax, aty);
}

// Original-space KKT summary derived from scaled-space vectors and products.
// Residual distances transform exactly (one scale factor per coordinate) and
// the scaled objective values already equal the original ones, so this costs
// no extra matrix products. Used for in-loop screening; the final
// declaration recomputes everything from unscaled data.
inline ResidualSummary residuals_from_scaled(const LpProblem& scaled, const RescalingInfo& info,
                                             const Vector& xs, const Vector& ys, const Vector& rs,
                                             const Vector& ax_s, const Vector& aty_s) {
  Scalar primal_inf = 0.0;
  for (size_t j = 0; j < ys.size(); ++j) {
    const Scalar d = interval_distance(ax_s[j], scaled.con_lower[j], scaled.con_upper[j]);
    primal_inf = std::max(primal_inf, d / info.row_scale[j]);
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    const Scalar d = interval_distance(xs[i], scaled.var_lower[i], scaled.var_upper[i]);
    primal_inf = std::max(primal_inf, d * info.col_scale[i]);
  }
  Scalar dual_inf = 0.0;
  Scalar pobj = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const Scalar d = std::abs(scaled.objective[i] - aty_s[i] - rs[i]);
    dual_inf = std::max(dual_inf, d / info.col_scale[i]);
    pobj += scaled.objective[i] * xs[i];
  }
  return finish_summary(primal_inf, dual_inf, pobj, dual_objective_value(scaled, ys, rs));
}

struct TerminationTolerances {
  Scalar eps_primal = 1e-8;
  Scalar eps_dual = 1e-8;
  Scalar eps_rel_gap = 1e-2;
};

inline bool check_termination(const ResidualSummary& s, const TerminationTolerances& tol) {
  return s.primal_residual_inf <= tol.eps_primal && s.dual_residual_inf <= tol.eps_dual &&
         s.rel_gap <= tol.eps_rel_gap;
}

// --- Infeasibility certificates -------------------------------------------

enum class CertificateKind { PrimalInfeasible, DualInfeasible };

struct InfeasibilityCertificate {
  CertificateKind kind = CertificateKind::PrimalInfeasible;
  Vector ray_x;          // dual-infeasible: unbounded primal ray
  Vector ray_y;          // primal-infeasible: dual ray (in its sign cone)
  Vector ray_r;          // reduced-cost completion of the dual ray
  Scalar residual_inf = kInf;  // homogeneous constraint residual
  Scalar objective = 0.0;      // ray objective (> 0 for primal cert, < 0 for dual cert)
  const char* source = "";     // candidate sequence that produced the ray
};

struct RayCandidate {
  const Vector* x = nullptr;
  const Vector* y = nullptr;
  const char* source = "";
};

// Primal infeasibility test on dual ray candidate yc. The candidate is first
// projected onto its sign cone (any vector may serve as a candidate; the
// conditions are verified on the projected ray, so emitted certificates
// satisfy them exactly as stated).
inline std::optional<InfeasibilityCertificate> try_primal_infeasibility(const LpProblem& p,
                                                                        const Vector& yc,
                                                                        Scalar eps_ray,
                                                                        const char* source) {
  Vector ray(yc.size());
  Scalar norm = 0.0;
  for (size_t j = 0; j < yc.size(); ++j) {
    ray[j] = cone_project(yc[j], dual_cone(p, static_cast<Index>(j)));
    norm = std::max(norm, std::abs(ray[j]));
  }
  if (!(norm > 0.0)) return std::nullopt;
  Vector aty(static_cast<size_t>(p.cols()), 0.0);
  for (Index c = 0; c < p.cols(); ++c) {
    Scalar acc = 0.0;
    for (Index k = p.a.by_col.start[static_cast<size_t>(c)];
         k < p.a.by_col.start[static_cast<size_t>(c) + 1]; ++k) {
      acc += p.a.by_col.value[static_cast<size_t>(k)] *
             ray[static_cast<size_t>(p.a.by_col.index[static_cast<size_t>(k)])];
    }
    aty[static_cast<size_t>(c)] = acc;
  }
  Vector rhat(static_cast<size_t>(p.cols()));
  Scalar residual = 0.0;
  for (size_t i = 0; i < rhat.size(); ++i) {
    rhat[i] = cone_project(-aty[i], cone_of_bounds(p.var_lower[i], p.var_upper[i]));
    residual = std::max(residual, std::abs(aty[i] + rhat[i]));
  }
  if (residual > eps_ray * norm) return std::nullopt;
  const Scalar objective = dual_objective_value(p, ray, rhat);
  if (!(objective > 0.0) || !is_finite(objective)) return std::nullopt;
  InfeasibilityCertificate cert;
  cert.kind = CertificateKind::PrimalInfeasible;
  cert.ray_y = std::move(ray);
  cert.ray_r = std::move(rhat);
  cert.residual_inf = residual;
  cert.objective = objective;
  cert.source = source;
  return cert;
}

// Dual infeasibility test on primal ray candidate xc: the ray must lie in the
// recession cone of the variable box, push Ax into the recession cone of the
// constraint intervals, and strictly improve the objective.
inline std::optional<InfeasibilityCertificate> try_dual_infeasibility(const LpProblem& p,
                                                                      const Vector& xc,
                                                                      Scalar eps_ray,
                                                                      const char* source) {
  Scalar norm = 0.0;
  for (Scalar v : xc) norm = std::max(norm, std::abs(v));
  if (!(norm > 0.0)) return std::nullopt;
  Scalar residual = 0.0;
  for (size_t i = 0; i < xc.size(); ++i) {
    const SignCone cone = recession_cone(p.var_lower[i], p.var_upper[i]);
    residual = std::max(residual, std::abs(xc[i] - cone_project(xc[i], cone)));
  }
  Scalar objective = 0.0;
  for (size_t i = 0; i < xc.size(); ++i) objective += p.objective[i] * xc[i];
  for (Index row = 0; row < p.rows(); ++row) {
    Scalar acc = 0.0;
    for (Index k = p.a.by_row.start[static_cast<size_t>(row)];
         k < p.a.by_row.start[static_cast<size_t>(row) + 1]; ++k) {
      acc += p.a.by_row.value[static_cast<size_t>(k)] *
             xc[static_cast<size_t>(p.a.by_row.index[static_cast<size_t>(k)])];
    }
    const SignCone cone = recession_cone(p.con_lower[static_cast<size_t>(row)],
                                         p.con_upper[static_cast<size_t>(row)]);
    residual = std::max(residual, std::abs(acc - cone_project(acc, cone)));
  }
  if (residual > eps_ray * norm) return std::nullopt;
  if (!(objective < 0.0)) return std::nullopt;
  InfeasibilityCertificate cert;
  cert.kind = CertificateKind::DualInfeasible;
  cert.ray_x = xc;
  cert.residual_inf = residual;
  cert.objective = objective;
  cert.source = source;
  return cert;
}

// Candidates are evaluated in the given order; per candidate the primal
// infeasibility test runs before the dual one; the first certificate wins.
inline std::optional<InfeasibilityCertificate> check_infeasibility(
    const LpProblem& p, const std::vector<RayCandidate>& candidates, Scalar eps_ray) {
  for (const RayCandidate& cand : candidates) {
    if (cand.y != nullptr) {
      auto cert = try_primal_infeasibility(p, *cand.y, eps_ray, cand.source);
      if (cert.has_value()) return cert;
    }
    if (cand.x != nullptr) {
      auto cert = try_dual_infeasibility(p, *cand.x, eps_ray, cand.source);
      if (cert.has_value()) return cert;
    }
  }
  return std::nullopt;
}

}  // namespace pdhglp
