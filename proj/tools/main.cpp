// Command-line front end: solve MPS models, generate benchmark instances,
// and verify solution files against the model they came from.
//
// Exit codes for `solve`: 0 optimal, 2 infeasible or unbounded, 3 iteration
// or time limit, 4 numerical failure, 5 input error.  `check` exits 0 when
// every verification passes, 1 on a failed verification, 5 on input errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdhglp/generator.hpp"
#include "pdhglp/mps.hpp"
#include "pdhglp/residuals.hpp"
#include "pdhglp/solution_io.hpp"
#include "pdhglp/solver.hpp"

namespace {

using namespace pdhglp;

constexpr int kExitOptimal = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitInput = 5;

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::PrimalInfeasible:
    case SolveStatus::DualInfeasible: return kExitInfeasible;
    case SolveStatus::IterationLimit:
    case SolveStatus::TimeLimit: return kExitLimit;
    case SolveStatus::NumericalError: return kExitNumerical;
  }
  return kExitNumerical;
}

bool write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

struct SolveArgs {
  std::string input;
  std::string out_path;
  Scalar eps_primal = TerminationTolerances{}.eps_primal;
  Scalar eps_dual = TerminationTolerances{}.eps_dual;
  Scalar rel_gap = TerminationTolerances{}.eps_rel_gap;
  Index iters = SolverOptions{}.iteration_limit;
  Scalar time_limit = 0.0;  // 0 means no limit
  int threads = 1;
  bool no_polish = false;
  bool no_scaling = false;
  bool no_restarts = false;
  bool no_detect = false;
  bool no_solution = false;
  bool quiet = false;
  std::optional<Scalar> fixed_step;
  std::optional<Scalar> fixed_weight;
};

int run_solve(const SolveArgs& a) {
  MpsModel model;
  try {
    model = read_mps_file(a.input);
  } catch (const MpsParseError& ex) {
    std::fprintf(stderr, "error: %s: %s\n", a.input.c_str(), ex.what());
    return kExitInput;
  }

  SolverOptions opt;
  opt.tolerances.eps_primal = a.eps_primal;
  opt.tolerances.eps_dual = a.eps_dual;
  opt.tolerances.eps_rel_gap = a.rel_gap;
  opt.iteration_limit = a.iters;
  if (a.time_limit > 0.0) opt.time_limit_seconds = a.time_limit;
  opt.threads = a.threads;
  opt.enable_polish = !a.no_polish;
  opt.enable_scaling = !a.no_scaling;
  opt.enable_restarts = !a.no_restarts;
  opt.detect_infeasibility = !a.no_detect;
  opt.logging = !a.quiet;
  if (a.fixed_step) opt.fixed_step_size = *a.fixed_step;
  if (a.fixed_weight) opt.fixed_primal_weight = *a.fixed_weight;

  SolveResult result;
  try {
    result = solve(model.problem, opt);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInput;
  }

  const SolutionDocument doc = make_document(result, model.maximize, !a.no_solution);
  const std::string json = solution_to_json(doc);
  if (a.out_path.empty()) {
    std::fputs(json.c_str(), stdout);
  } else if (!write_text_file(a.out_path, json)) {
    std::fprintf(stderr, "error: cannot write '%s'\n", a.out_path.c_str());
    return kExitInput;
  }
  if (!a.quiet) {
    std::fprintf(stderr, "status=%s objective=%.12g iterations=%lld seconds=%.3f\n",
                 doc.status.c_str(), doc.objective_primal,
                 static_cast<long long>(result.iterations), result.solve_seconds);
  }
  return exit_code_for(result.status);
}

struct GenerateArgs {
  std::string kind = "random-feasible";
  Index rows = 50;
  Index cols = 100;
  double density = 0.1;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string certificate_path;
};

int run_generate(const GenerateArgs& a) {
  const auto kind = instance_kind_from_name(a.kind);
  if (!kind) {
    std::fprintf(stderr, "error: unknown instance kind '%s'\n", a.kind.c_str());
    return kExitInput;
  }
  GeneratorSpec spec;
  spec.kind = *kind;
  spec.rows = a.rows;
  spec.cols = a.cols;
  spec.density = a.density;
  spec.seed = a.seed;

  GeneratedInstance inst;
  try {
    inst = generate_instance(spec);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInput;
  }

  std::ostringstream name;
  name << a.kind << "-" << a.rows << "x" << a.cols << "-s" << a.seed;
  const std::string mps = write_mps(inst.problem, name.str());
  if (a.out_path.empty()) {
    std::fputs(mps.c_str(), stdout);
  } else if (!write_text_file(a.out_path, mps)) {
    std::fprintf(stderr, "error: cannot write '%s'\n", a.out_path.c_str());
    return kExitInput;
  }

  if (!a.certificate_path.empty()) {
    nlohmann::ordered_json j;
    j["kind"] = a.kind;
    j["rows"] = a.rows;
    j["cols"] = a.cols;
    j["density"] = a.density;
    j["seed"] = a.seed;
    if (inst.optimal_objective) j["optimal_objective"] = *inst.optimal_objective;
    if (!inst.x_star.empty()) j["x_star"] = inst.x_star;
    if (!inst.y_star.empty()) j["y_star"] = inst.y_star;
    if (!inst.r_star.empty()) j["r_star"] = inst.r_star;
    if (!inst.feasible_point.empty()) j["feasible_point"] = inst.feasible_point;
    if (!write_text_file(a.certificate_path, j.dump(2) + "\n")) {
      std::fprintf(stderr, "error: cannot write '%s'\n", a.certificate_path.c_str());
      return kExitInput;
    }
  }
  return 0;
}

struct CheckArgs {
  std::string input;
  std::string solution;
  Scalar eps_primal = TerminationTolerances{}.eps_primal;
  Scalar eps_dual = TerminationTolerances{}.eps_dual;
  Scalar rel_gap = TerminationTolerances{}.eps_rel_gap;
  Scalar consistency = 1e-6;  // reported-vs-recomputed relative slack
  Scalar eps_ray = 1e-12;
};

bool close_enough(Scalar got, Scalar want, Scalar rel) {
  if (!is_finite(want) || !is_finite(got)) {
    return (std::isnan(want) && std::isnan(got)) || got == want;
  }
  return std::abs(got - want) <= rel * std::max(Scalar(1.0), std::abs(want));
}

int run_check(const CheckArgs& a) {
  MpsModel model;
  try {
    model = read_mps_file(a.input);
  } catch (const MpsParseError& ex) {
    std::fprintf(stderr, "error: %s: %s\n", a.input.c_str(), ex.what());
    return kExitInput;
  }
  std::ifstream in(a.solution, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot open '%s'\n", a.solution.c_str());
    return kExitInput;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  SolutionDocument doc;
  try {
    doc = solution_from_json(buf.str());
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitInput;
  }

  const LpProblem& p = model.problem;
  bool all_ok = true;
  bool verified_anything = false;
  const auto report = [&](const char* what, bool ok, const std::string& detail) {
    std::printf("%s: %s%s%s\n", what, ok ? "ok" : "FAIL", detail.empty() ? "" : " ",
                detail.c_str());
    all_ok = all_ok && ok;
    verified_anything = true;
  };

  if (doc.maximize != model.maximize) {
    report("objective sense matches the model", false,
           doc.maximize ? "(solution says max, model says min)"
                        : "(solution says min, model says max)");
  }

  if (doc.has_solution) {
    if (doc.x.size() != static_cast<size_t>(p.cols()) ||
        doc.y.size() != static_cast<size_t>(p.rows()) ||
        doc.reduced_costs.size() != static_cast<size_t>(p.cols())) {
      std::fprintf(stderr, "error: solution array sizes do not match the model\n");
      return kExitInput;
    }
    const ResidualSummary s = kkt_residuals(p, doc.x, doc.y, doc.reduced_costs);
    const Scalar sign = model.maximize ? -1.0 : 1.0;

    {
      std::ostringstream d;
      d << "(reported " << doc.primal_residual_inf << ", recomputed " << s.primal_residual_inf
        << ")";
      report("reported primal residual matches",
             close_enough(s.primal_residual_inf, doc.primal_residual_inf, a.consistency),
             d.str());
    }
    {
      std::ostringstream d;
      d << "(reported " << doc.dual_residual_inf << ", recomputed " << s.dual_residual_inf
        << ")";
      report("reported dual residual matches",
             close_enough(s.dual_residual_inf, doc.dual_residual_inf, a.consistency), d.str());
    }
    {
      std::ostringstream d;
      d << "(reported " << doc.objective_primal << ", recomputed " << sign * s.primal_objective
        << ")";
      report("reported objective matches",
             close_enough(sign * s.primal_objective, doc.objective_primal, a.consistency),
             d.str());
    }
    if (doc.status == "optimal") {
      TerminationTolerances tol{a.eps_primal, a.eps_dual, a.rel_gap};
      std::ostringstream d;
      d << "(primal " << s.primal_residual_inf << ", dual " << s.dual_residual_inf
        << ", rel_gap " << s.rel_gap << ")";
      report("point satisfies the optimality tolerances", check_termination(s, tol), d.str());
    }
  }

  if (doc.has_certificate) {
    if (doc.certificate_kind == "primal_infeasible") {
      if (doc.ray_y.size() != static_cast<size_t>(p.rows())) {
        std::fprintf(stderr, "error: certificate ray size does not match the model\n");
        return kExitInput;
      }
      const auto echo = try_primal_infeasibility(p, doc.ray_y, a.eps_ray, "check");
      std::ostringstream d;
      if (echo) d << "(ray objective " << echo->objective << ", residual " << echo->residual_inf << ")";
      report("primal infeasibility certificate verifies", echo.has_value(), d.str());
    } else if (doc.certificate_kind == "dual_infeasible") {
      if (doc.ray_x.size() != static_cast<size_t>(p.cols())) {
        std::fprintf(stderr, "error: certificate ray size does not match the model\n");
        return kExitInput;
      }
      const auto echo = try_dual_infeasibility(p, doc.ray_x, a.eps_ray, "check");
      std::ostringstream d;
      if (echo) d << "(ray objective " << echo->objective << ", residual " << echo->residual_inf << ")";
      report("dual infeasibility certificate verifies", echo.has_value(), d.str());
    } else {
      std::fprintf(stderr, "error: unknown certificate kind '%s'\n",
                   doc.certificate_kind.c_str());
      return kExitInput;
    }
  }

  if (!verified_anything) {
    std::fprintf(stderr, "error: solution file carries neither arrays nor a certificate\n");
    return kExitInput;
  }
  return all_ok ? 0 : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order linear programming solver"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve an MPS model and emit JSON");
  solve_cmd->add_option("input", sa.input, "MPS file")->required();
  solve_cmd->add_option("--eps-primal", sa.eps_primal, "Primal feasibility tolerance");
  solve_cmd->add_option("--eps-dual", sa.eps_dual, "Dual feasibility tolerance");
  solve_cmd->add_option("--rel-gap", sa.rel_gap, "Relative duality-gap tolerance");
  solve_cmd->add_option("--iters", sa.iters, "Iteration limit");
  solve_cmd->add_option("--time-limit", sa.time_limit, "Time limit in seconds (0: none)");
  solve_cmd->add_option("--threads", sa.threads, "Worker threads");
  solve_cmd->add_flag("--no-polish", sa.no_polish, "Disable feasibility polishing");
  solve_cmd->add_flag("--no-scaling", sa.no_scaling, "Disable diagonal preconditioning");
  solve_cmd->add_flag("--no-restarts", sa.no_restarts, "Disable adaptive restarts");
  solve_cmd->add_flag("--no-detect", sa.no_detect, "Disable infeasibility detection");
  solve_cmd->add_flag("--no-solution", sa.no_solution, "Omit solution arrays from the JSON");
  solve_cmd->add_flag("--quiet", sa.quiet, "Suppress progress logging on stderr");
  solve_cmd->add_option("--out", sa.out_path, "Write the JSON document here instead of stdout");
  double fixed_step = 0.0, fixed_weight = 0.0;
  CLI::Option* fs = solve_cmd->add_option("--fixed-step", fixed_step, "Freeze the step size");
  CLI::Option* fw = solve_cmd->add_option("--fixed-weight", fixed_weight, "Freeze the primal weight");

  GenerateArgs ga;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Emit a benchmark instance as MPS");
  gen_cmd->add_option("--kind", ga.kind,
                      "random-feasible | random-infeasible | transport | feasibility-system");
  gen_cmd->add_option("--rows", ga.rows, "Constraint rows (transport: supply nodes)");
  gen_cmd->add_option("--cols", ga.cols, "Variables (transport: demand nodes)");
  gen_cmd->add_option("--density", ga.density, "Nonzero density in (0, 1]");
  gen_cmd->add_option("--seed", ga.seed, "Random seed");
  gen_cmd->add_option("--out", ga.out_path, "Write the MPS file here instead of stdout");
  gen_cmd->add_option("--certificate", ga.certificate_path,
                      "Also write the known solution data as JSON");

  CheckArgs ca;
  CLI::App* check_cmd = app.add_subcommand("check", "Verify a solution file against its model");
  check_cmd->add_option("input", ca.input, "MPS file")->required();
  check_cmd->add_option("solution", ca.solution, "Solution JSON produced by solve")->required();
  check_cmd->add_option("--eps-primal", ca.eps_primal, "Primal feasibility tolerance");
  check_cmd->add_option("--eps-dual", ca.eps_dual, "Dual feasibility tolerance");
  check_cmd->add_option("--rel-gap", ca.rel_gap, "Relative duality-gap tolerance");
  check_cmd->add_option("--consistency", ca.consistency,
                        "Relative slack when comparing reported to recomputed values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (solve_cmd->parsed()) {
    if (fs->count() > 0) sa.fixed_step = fixed_step;
    if (fw->count() > 0) sa.fixed_weight = fixed_weight;
    return run_solve(sa);
  }
  if (gen_cmd->parsed()) return run_generate(ga);
  if (check_cmd->parsed()) return run_check(ca);
  return kExitInput;
}
