#pragma once

// JSON serialization of solve results and the matching reader used by the
// result-verification command.  Numbers are written with shortest-round-trip
// precision; non-finite values are encoded as the strings "inf", "-inf", and
// "nan" since JSON has no literals for them.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pdhglp/residuals.hpp"
#include "pdhglp/solver.hpp"

namespace pdhglp {

struct SolutionDocument {
  int schema_version = 1;
  std::string status;
  std::string detail;
  bool maximize = false;

  // Objective values in the user's stated sense; everything else (arrays and
  // residuals) lives in the minimization form the solver works with.
  Scalar objective_primal = 0.0;
  Scalar objective_dual = 0.0;
  Scalar primal_residual_inf = 0.0;
  Scalar dual_residual_inf = 0.0;
  Scalar abs_gap = 0.0;
  Scalar rel_gap = 0.0;

  Index iterations = 0;
  Index polish_iterations = 0;
  Index restarts = 0;
  Index step_retries = 0;
  Scalar solve_seconds = 0.0;
  Scalar final_step_size = 0.0;
  Scalar final_primal_weight = 0.0;

  bool has_solution = false;
  Vector x;
  Vector y;
  Vector reduced_costs;

  bool has_certificate = false;
  std::string certificate_kind;
  Vector ray_x;
  Vector ray_y;
  Vector ray_r;
  Scalar certificate_residual = 0.0;
  Scalar certificate_objective = 0.0;
};

namespace io_detail {

using Json = nlohmann::ordered_json;

inline Json enc(Scalar v) {
  if (is_finite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Scalar dec(const Json& j, const char* where) {
  if (j.is_number()) return j.get<Scalar>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<Scalar>::quiet_NaN();
  }
  throw std::runtime_error(std::string("solution file: bad number in ") + where);
}

inline Json enc_vector(const Vector& v) {
  Json a = Json::array();
  for (Scalar s : v) a.push_back(enc(s));
  return a;
}

inline Vector dec_vector(const Json& j, const char* where) {
  if (!j.is_array()) throw std::runtime_error(std::string("solution file: ") + where + " is not an array");
  Vector out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(dec(e, where));
  return out;
}

}  // namespace io_detail

inline SolutionDocument make_document(const SolveResult& result, bool maximize,
                                      bool include_solution) {
  const Scalar sign = maximize ? -1.0 : 1.0;
  SolutionDocument d;
  d.status = solve_status_name(result.status);
  d.detail = result.termination_detail;
  d.maximize = maximize;
  d.objective_primal = sign * result.summary.primal_objective;
  d.objective_dual = sign * result.summary.dual_objective;
  d.primal_residual_inf = result.summary.primal_residual_inf;
  d.dual_residual_inf = result.summary.dual_residual_inf;
  d.abs_gap = result.summary.abs_gap;
  d.rel_gap = result.summary.rel_gap;
  d.iterations = result.iterations;
  d.polish_iterations = result.polish_iterations;
  d.restarts = result.restarts;
  d.step_retries = result.step_retries;
  d.solve_seconds = result.solve_seconds;
  d.final_step_size = result.final_step_size;
  d.final_primal_weight = result.final_primal_weight;
  if (include_solution) {
    d.has_solution = true;
    d.x = result.x;
    d.y = result.y;
    d.reduced_costs = result.reduced_costs;
  }
  if (result.certificate.has_value()) {
    const InfeasibilityCertificate& c = *result.certificate;
    d.has_certificate = true;
    d.certificate_kind = c.kind == CertificateKind::PrimalInfeasible ? "primal_infeasible"
                                                                     : "dual_infeasible";
    d.ray_x = c.ray_x;
    d.ray_y = c.ray_y;
    d.ray_r = c.ray_r;
    d.certificate_residual = c.residual_inf;
    d.certificate_objective = c.objective;
  }
  return d;
}

inline std::string solution_to_json(const SolutionDocument& d, int indent = 2) {
  using io_detail::Json;
  using io_detail::enc;
  using io_detail::enc_vector;

  Json j;
  j["schema_version"] = d.schema_version;
  j["status"] = d.status;
  j["termination_detail"] = d.detail;
  j["sense"] = d.maximize ? "max" : "min";
  j["objective"] = Json{{"primal", enc(d.objective_primal)}, {"dual", enc(d.objective_dual)}};
  j["residuals"] = Json{{"primal_inf", enc(d.primal_residual_inf)},
                        {"dual_inf", enc(d.dual_residual_inf)},
                        {"abs_gap", enc(d.abs_gap)},
                        {"rel_gap", enc(d.rel_gap)}};
  j["statistics"] = Json{{"iterations", d.iterations},
                         {"polish_iterations", d.polish_iterations},
                         {"restarts", d.restarts},
                         {"step_retries", d.step_retries},
                         {"solve_seconds", d.solve_seconds},
                         {"final_step_size", enc(d.final_step_size)},
                         {"final_primal_weight", enc(d.final_primal_weight)}};
  if (d.has_certificate) {
    j["certificate"] = Json{{"kind", d.certificate_kind},
                            {"residual_inf", enc(d.certificate_residual)},
                            {"objective", enc(d.certificate_objective)},
                            {"ray_x", enc_vector(d.ray_x)},
                            {"ray_y", enc_vector(d.ray_y)},
                            {"ray_r", enc_vector(d.ray_r)}};
  }
  if (d.has_solution) {
    j["solution"] = Json{{"x", enc_vector(d.x)},
                         {"y", enc_vector(d.y)},
                         {"reduced_costs", enc_vector(d.reduced_costs)}};
  }
  return j.dump(indent) + "\n";
}

inline SolutionDocument solution_from_json(const std::string& text) {
  using io_detail::Json;
  using io_detail::dec;
  using io_detail::dec_vector;

  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("solution file: ") + ex.what());
  }
  if (!j.is_object()) throw std::runtime_error("solution file: top level is not an object");

  SolutionDocument d;
  d.schema_version = j.value("schema_version", 0);
  if (d.schema_version != 1) {
    throw std::runtime_error("solution file: unsupported schema_version");
  }
  if (!j.contains("status") || !j["status"].is_string()) {
    throw std::runtime_error("solution file: missing status");
  }
  d.status = j["status"].get<std::string>();
  d.detail = j.value("termination_detail", "");
  d.maximize = j.value("sense", "min") == std::string("max");
  if (j.contains("objective")) {
    d.objective_primal = dec(j["objective"].at("primal"), "objective.primal");
    d.objective_dual = dec(j["objective"].at("dual"), "objective.dual");
  }
  if (j.contains("residuals")) {
    const Json& r = j["residuals"];
    d.primal_residual_inf = dec(r.at("primal_inf"), "residuals.primal_inf");
    d.dual_residual_inf = dec(r.at("dual_inf"), "residuals.dual_inf");
    d.abs_gap = dec(r.at("abs_gap"), "residuals.abs_gap");
    d.rel_gap = dec(r.at("rel_gap"), "residuals.rel_gap");
  }
  if (j.contains("statistics")) {
    const Json& s = j["statistics"];
    d.iterations = s.value("iterations", Index{0});
    d.polish_iterations = s.value("polish_iterations", Index{0});
    d.restarts = s.value("restarts", Index{0});
    d.step_retries = s.value("step_retries", Index{0});
    d.solve_seconds = s.value("solve_seconds", 0.0);
    if (s.contains("final_step_size")) d.final_step_size = dec(s["final_step_size"], "statistics.final_step_size");
    if (s.contains("final_primal_weight")) {
      d.final_primal_weight = dec(s["final_primal_weight"], "statistics.final_primal_weight");
    }
  }
  if (j.contains("certificate")) {
    const Json& c = j["certificate"];
    d.has_certificate = true;
    d.certificate_kind = c.value("kind", "");
    d.certificate_residual = dec(c.at("residual_inf"), "certificate.residual_inf");
    d.certificate_objective = dec(c.at("objective"), "certificate.objective");
    d.ray_x = dec_vector(c.at("ray_x"), "certificate.ray_x");
    d.ray_y = dec_vector(c.at("ray_y"), "certificate.ray_y");
    d.ray_r = dec_vector(c.at("ray_r"), "certificate.ray_r");
  }
  if (j.contains("solution")) {
    const Json& s = j["solution"];
    d.has_solution = true;
    d.x = dec_vector(s.at("x"), "solution.x");
    d.y = dec_vector(s.at("y"), "solution.y");
    d.reduced_costs = dec_vector(s.at("reduced_costs"), "solution.reduced_costs");
  }
  return d;
}

}  // namespace pdhglp
