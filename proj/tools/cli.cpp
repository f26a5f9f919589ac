#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "gausskraft/admissibility.hpp"
#include "gausskraft/functional.hpp"
#include "gausskraft/io.hpp"
#include "gausskraft/solver.hpp"
#include "gausskraft/transport.hpp"

namespace gausskraft::cli {

namespace {

int exit_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::Degenerated: return kDegenerated;
    case SolveStatus::MaxIters: return kMaxIters;
  }
  return kFailed;
}

/// Maps library errors to the command exit codes.
int report_error(const Error& e, std::ostream& err) {
  err << "gausskraft: " << e.what() << '\n';
  return e.code() == ErrorCode::ParseError ? kParse : kFailed;
}

constexpr double kGradcheckQuadTol = 1e-12;

}  // namespace

int cmd_validate(const std::string& instance_path, std::ostream& out, std::ostream& err) {
  try {
    const ProblemInstance inst = load_instance(instance_path);
    const AdmissibilityReport rep = check_admissibility(inst);
    out << dump_json(report_to_json(rep));
    if (!rep.ok()) {
      err << "gausskraft: " << describe_failure(rep) << '\n';
      return kFailed;
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ProblemInstance inst = load_instance(opts.instance_path);
    SolveConfig cfg;
    cfg.mass_tol = opts.tol;
    cfg.max_iters = opts.max_iters;
    cfg.skip_validation = opts.force;
    SolveReport rep;
    try {
      rep = solve(inst, cfg);
    } catch (const InvalidInstance& e) {
      out << dump_json(report_to_json(e.report()));
      err << "gausskraft: " << e.what() << '\n';
      return kFailed;
    }
    double gap = 0.0;
    std::optional<RadialPolytope> poly;
    try {
      poly = RadialPolytope::build(inst, rep.log_radii);
      gap = duality_gap(inst, *poly);
    } catch (const Error& e) {
      err << "gausskraft: final polytope unavailable: " << e.what() << '\n';
      gap = std::nan("");
    }
    const std::string text = dump_json(solution_to_json(rep, cfg, gap));
    if (opts.out_path) write_text_file(*opts.out_path, text);
    out << text;
    if (opts.obj_path) {
      if (inst.dimension() != 2) {
        err << "gausskraft: OBJ export needs dimension 2; skipped\n";
      } else if (poly && poly->origin_interior()) {
        write_text_file(*opts.obj_path, export_obj(*poly));
      }
    }
    err << "gausskraft: " << to_string(rep.status) << " after " << rep.iterations
        << " iterations, residual " << rep.residual << '\n';
    return exit_for(rep.status);
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_refine(const RefineOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const DensitySpec density = load_density(opts.density);
    SolveConfig cfg;
    cfg.mass_tol = opts.tol;
    std::vector<LevelResult> levels;
    try {
      levels = solve_refined(density, opts.levels, cfg);
    } catch (const InvalidInstance& e) {
      out << dump_json(report_to_json(e.report()));
      err << "gausskraft: " << e.what() << '\n';
      return kFailed;
    }
    if (opts.out_dir) std::filesystem::create_directories(*opts.out_dir);
    Json summary;
    summary["density"] = density_to_json(density);
    Json rows = Json::array();
    int code = kOk;
    for (const LevelResult& lr : levels) {
      Json row;
      row["level"] = lr.level;
      row["points"] = lr.instance.size();
      row["status"] = std::string(to_string(lr.report.status));
      row["iterations"] = lr.report.iterations;
      row["Q"] = lr.report.Q_star;
      row["residual"] = lr.report.residual;
      row["sphere_deviation"] = lr.sphere_deviation;
      row["q_change"] = lr.q_change ? Json(*lr.q_change) : Json(nullptr);
      row["radial_change"] = lr.radial_change ? Json(*lr.radial_change) : Json(nullptr);
      rows.push_back(std::move(row));
      if (opts.out_dir) {
        const std::filesystem::path dir(*opts.out_dir);
        write_text_file(dir / ("level_" + std::to_string(lr.level) + ".json"),
                        dump_json(solution_to_json(lr.report, cfg,
                                                   duality_gap(lr.instance, lr.polytope))));
        write_text_file(dir / ("level_" + std::to_string(lr.level) + ".obj"),
                        export_obj(lr.polytope));
      }
      if (code == kOk) code = exit_for(lr.report.status);
    }
    summary["levels"] = std::move(rows);
    const std::string text = dump_json(summary);
    if (opts.out_dir) write_text_file(std::filesystem::path(*opts.out_dir) / "summary.json", text);
    out << text;
    return code;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_oracle(const OracleOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ProblemInstance inst = load_instance(opts.instance_path);
    SolveReport rep;
    try {
      rep = solve(inst);
    } catch (const InvalidInstance& e) {
      out << dump_json(report_to_json(e.report()));
      err << "gausskraft: " << e.what() << '\n';
      return kFailed;
    }
    if (rep.status != SolveStatus::Converged) {
      err << "gausskraft: solve did not converge (" << to_string(rep.status) << ")\n";
      return exit_for(rep.status);
    }
    const RadialPolytope poly = RadialPolytope::build(inst, rep.log_radii);
    const TransportPlan plan = plan_from_polytope(poly);
    const LpResult lp = lp_oracle(inst, opts.samples, opts.seed);
    Json j;
    j["lp_value"] = lp.value;
    j["semidiscrete_value"] = plan.total_cost;
    j["relative_gap"] = std::abs(lp.value - plan.total_cost) / std::abs(plan.total_cost);
    j["samples"] = lp.plan.samples.size();
    j["pivots"] = lp.pivots;
    if (opts.plan_path) write_text_file(*opts.plan_path, dump_json(plan_to_json(lp)));
    out << dump_json(j);
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (!(opts.eps > 0.0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
    const ProblemInstance inst = load_instance(opts.instance_path);
    const AdmissibilityReport adm = check_admissibility(inst);
    if (!adm.ok()) {
      out << dump_json(report_to_json(adm));
      err << "gausskraft: " << describe_failure(adm) << '\n';
      return kFailed;
    }
    const std::size_t K = inst.size();
    const double floor = 1e-2 * sphere_measure(inst.dimension()) / static_cast<double>(K);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    double worst = 0.0;
    Json per_point = Json::array();
    for (int p = 0; p < opts.points; ++p) {
      std::vector<double> x;
      std::optional<EvalReport> base;
      for (int attempt = 0; attempt < 100 && !base; ++attempt) {
        x.assign(K, 0.0);
        for (double& v : x) v = unif(rng);
        x = gauge_project(inst, x);
        try {
          base = eval(inst, x, kGradcheckQuadTol);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::OriginNotInterior) throw;
        }
      }
      if (!base) throw Error(ErrorCode::OriginNotInterior, "no valid random point found");
      double diff = 0.0;
      double gmax = 0.0;
      for (std::size_t m = 0; m < K; ++m) {
        std::vector<double> xp = x;
        std::vector<double> xm = x;
        xp[m] += opts.eps;
        xm[m] -= opts.eps;
        const double fd =
            (eval(inst, xp, kGradcheckQuadTol).Q - eval(inst, xm, kGradcheckQuadTol).Q) /
            (2.0 * opts.eps);
        diff = std::max(diff, std::abs(fd - base->gradient[m]));
        gmax = std::max(gmax, std::abs(base->gradient[m]));
      }
      const double rel = diff / std::max(gmax, floor);
      worst = std::max(worst, rel);
      per_point.push_back(rel);
    }
    Json j;
    j["eps"] = opts.eps;
    j["max_relative_error"] = worst;
    j["relative_errors"] = std::move(per_point);
    j["pass"] = worst < 1e-3;
    out << dump_json(j);
    return worst < 1e-3 ? kOk : kFailed;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Polytopes with prescribed integral Gauss curvature"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check admissibility of an instance");
  validate->add_option("instance", validate_path, "Instance JSON")->required();

  SolveOptions solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize the functional for an instance");
  solve_cmd->add_option("instance", solve_opts.instance_path, "Instance JSON")->required();
  solve_cmd->add_option("--tol", solve_opts.tol, "Mass residual tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", solve_opts.max_iters, "Iteration limit")->capture_default_str();
  solve_cmd->add_option("--out", solve_opts.out_path, "Solution JSON path");
  solve_cmd->add_option("--obj", solve_opts.obj_path, "OBJ mesh path");
  solve_cmd->add_flag("--force", solve_opts.force, "Skip admissibility checks");

  RefineOptions refine_opts;
  auto* refine = app.add_subcommand("refine", "Solve a density at increasing resolution");
  refine->add_option("density", refine_opts.density, "Density JSON path, 'uniform' or 'bump'")
      ->required();
  refine->add_option("--levels", refine_opts.levels, "Number of levels")->capture_default_str();
  refine->add_option("--out", refine_opts.out_dir, "Output directory");
  refine->add_option("--tol", refine_opts.tol, "Mass residual tolerance")->capture_default_str();

  OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "Compare against the discrete transport LP");
  oracle->add_option("instance", oracle_opts.instance_path, "Instance JSON")->required();
  oracle->add_option("--samples", oracle_opts.samples, "Sample normals")->capture_default_str();
  oracle->add_option("--seed", oracle_opts.seed, "Sample rotation seed")->capture_default_str();
  oracle->add_option("--plan", oracle_opts.plan_path, "Discrete plan JSON path");

  GradcheckOptions grad_opts;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("instance", grad_opts.instance_path, "Instance JSON")->required();
  gradcheck->add_option("--eps", grad_opts.eps, "Difference step")->capture_default_str();
  gradcheck->add_option("--points", grad_opts.points, "Random points")->capture_default_str();
  gradcheck->add_option("--seed", grad_opts.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  if (validate->parsed()) return cmd_validate(validate_path, std::cout, std::cerr);
  if (solve_cmd->parsed()) return cmd_solve(solve_opts, std::cout, std::cerr);
  if (refine->parsed()) return cmd_refine(refine_opts, std::cout, std::cerr);
  if (oracle->parsed()) return cmd_oracle(oracle_opts, std::cout, std::cerr);
  if (gradcheck->parsed()) return cmd_gradcheck(grad_opts, std::cout, std::cerr);
  return kParse;
}

}  // namespace gausskraft::cli
