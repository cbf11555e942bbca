#include "varmin/cli.hpp"
#include "varmin/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <ostream>

namespace varmin::cli {

namespace {

struct Invocation {
  std::string config;
  std::string out;
  std::string format;
  bool quiet = false;
};

struct Payload {
  json doc;
  std::string csv;
  int exit_code = kSuccess;
  std::string summary;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("failed writing output '" + path.string() + "'");
}

void emit(const Payload& p, const RunConfig& cfg, const Invocation& inv, std::ostream& out) {
  const std::string format = inv.format.empty() ? cfg.output.format : inv.format;
  std::optional<std::filesystem::path> path;
  if (!inv.out.empty()) {
    path = inv.out;
  } else if (cfg.output.path) {
    path = cfg.base_dir / *cfg.output.path;
  }
  const std::string json_text = p.doc.dump(2) + "\n";
  if (format == "json") {
    if (path) {
      write_file(*path, json_text);
    } else {
      out << json_text;
    }
  } else if (format == "csv") {
    if (path) {
      write_file(*path, p.csv);
    } else {
      out << p.csv;
    }
  } else {
    if (!path) throw ConfigError("--format both requires an output path");
    std::filesystem::path csv_path = *path;
    csv_path.replace_extension(".csv");
    if (csv_path == *path) csv_path += ".csv";
    write_file(*path, json_text);
    write_file(csv_path, p.csv);
  }
}

SolveOptions solve_options(const SolverSpec& s) {
  SolveOptions o;
  o.tol_grad = s.tol_grad;
  o.max_iter = s.max_iter;
  o.method = s.method;
  return o;
}

json solver_json(const SolverSpec& s) {
  return {{"K", s.K},
          {"tol_grad", s.tol_grad},
          {"max_iter", s.max_iter},
          {"method", to_string(s.method)},
          {"init", s.init ? to_string(*s.init) : std::string("straight_line")}};
}

SolveResult run_solver(const Problem& problem, const SolverSpec& s) {
  const DiscretePath init =
      initial_guess(problem, s.K, s.init.value_or(InitStrategy::straight_line));
  return minimize_discrete(problem, s.K, init, solve_options(s));
}

Payload cmd_solve(const RunConfig& cfg) {
  const Problem problem = build_problem(cfg);
  const SolveResult r = run_solver(problem, cfg.solver);
  Payload p;
  p.doc = solve_result_json(problem, r);
  p.doc["solver"] = solver_json(cfg.solver);
  p.doc["hamilton_residual"] = discrete_hamilton_residual(problem.model(), r.path, r.momenta);
  if (problem.is_bolza()) p.doc["transversality_residual"] = transversality_residual(problem, r);
  p.csv = path_csv(r.path, r.momenta);
  p.exit_code = r.converged ? kSuccess : kNumericalFailure;
  p.summary = fmt::format("solve: K={} action={} grad_norm={:.3e} iterations={} converged={}",
                          r.path.K(), format_double(r.action), r.grad_norm, r.iterations,
                          r.converged);
  return p;
}

Payload cmd_converge(const RunConfig& cfg) {
  if (!cfg.study) throw ConfigError("converge requires a study section");
  const Problem problem = build_problem(cfg);
  StudyOptions opts;
  opts.solve = solve_options(cfg.solver);
  opts.init = cfg.solver.init;
  const ConvergenceReport r = refine_study(problem, cfg.study->K0, cfg.study->levels, opts);
  Payload p;
  p.doc = convergence_report_json(r);
  p.doc["model"] = model_json(problem.model());
  p.doc["problem"] = problem_json(problem);
  p.doc["study"] = {{"K0", cfg.study->K0}, {"levels", cfg.study->levels}};
  p.doc["solver"] = solver_json(cfg.solver);
  p.csv = convergence_csv(r);
  p.exit_code = r.verdict == Verdict::inconclusive ? kNumericalFailure : kSuccess;
  p.summary = convergence_table(r);
  p.summary.pop_back();
  return p;
}

Payload cmd_verify(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("verify requires a model section");
  const LagrangianModel model = build_model(*cfg.model);
  const int d = model.dim();
  const VerifySpec& v = cfg.verify;
  const double t = cfg.problem ? cfg.problem->t : 1.0;

  std::optional<Problem> configured;
  if (cfg.problem) configured = build_problem(cfg);
  const TerminalCost* w =
      configured && configured->is_bolza() ? &configured->terminal_cost() : nullptr;

  SampleBox box = SampleBox::cube(d, v.box_lo, v.box_hi);
  box.t = {0.0, t};
  ConditionOptions copts;
  copts.seed = v.seed;
  const ConditionReport conditions = check_conditions(model, w, box, v.n_samples, copts);
  const LegendreSweep legendre = legendre_sweep(model, box, v.n_samples, v.seed);

  const Problem two_point = configured && configured->is_two_point()
                                ? *configured
                                : Problem::two_point(model, t, Vec::Zero(d), Vec::Ones(d));
  const Problem bolza = configured && configured->is_bolza()
                            ? *configured
                            : Problem::bolza(model, t, Vec::Ones(d), TerminalCost::quadratic(1.0, Vec::Zero(d)));
  json gradient = json::array();
  bool gradient_pass = true;
  std::string csv = "check,pass,value\n";
  for (const Problem* prob : {&two_point, &bolza}) {
    const GradientSweep g = gradient_sweep(*prob, v.fd_K, v.fd_paths, v.seed);
    const bool ok = v.fd_paths == 0 || g.pass();
    gradient_pass = gradient_pass && ok;
    const std::string kind = prob->is_bolza() ? "bolza" : "two_point";
    gradient.push_back({{"problem", kind},
                        {"paths", g.paths},
                        {"max_relative_error", g.max_relative_error},
                        {"pass", ok}});
    csv += fmt::format("gradient_{},{},{}\n", kind, ok, format_double(g.max_relative_error));
  }
  for (const ConditionCheck& c : conditions.checks) {
    csv += fmt::format("{},{},{}\n", c.name, c.pass, format_double(c.worst_violation));
  }
  csv += fmt::format("legendre_roundtrip,{},{}\n", legendre.pass(), format_double(legendre.max_roundtrip));

  const bool pass = conditions.pass() && legendre.pass() && gradient_pass;
  Payload p;
  p.doc = {{"schema_version", kSchemaVersion},
           {"command", "verify"},
           {"model", model_json(model)},
           {"conditions", condition_report_json(conditions)},
           {"legendre",
            {{"samples", legendre.samples},
             {"max_roundtrip", legendre.max_roundtrip},
             {"max_equality_gap", legendre.max_equality_gap},
             {"min_gap", legendre.min_gap},
             {"false_equalities", legendre.false_equalities},
             {"max_dHdx_error", legendre.max_dHdx_error},
             {"solve_failures", legendre.solve_failures},
             {"pass", legendre.pass()}}},
           {"gradient", gradient},
           {"pass", pass}};
  p.csv = csv;
  p.exit_code = pass ? kSuccess : kNumericalFailure;
  p.summary = fmt::format("verify: {} conditions={} legendre={} gradient={}", pass ? "PASS" : "FAIL",
                          conditions.pass(), legendre.pass(), gradient_pass);
  for (const ConditionCheck& c : conditions.checks) {
    if (!c.pass) p.summary += fmt::format("\n  {} violated (worst {:.3e})", c.name, c.worst_violation);
  }
  return p;
}

Payload cmd_mollify(const RunConfig& cfg) {
  if (!cfg.mollify) throw ConfigError("mollify requires a mollify section");
  const Problem problem = build_problem(cfg);
  const MollifySpec& m = *cfg.mollify;
  const std::filesystem::path curve_path = cfg.base_dir / m.curve;
  std::ifstream in(curve_path);
  if (!in) throw ConfigError("cannot open curve file '" + curve_path.string() + "'");
  SampledCurve curve = read_curve_csv(in);
  const double t = problem.horizon();
  if (curve.s.front() != 0.0 || std::abs(curve.s.back() - t) > 1e-12 * (1.0 + t)) {
    throw ConfigError("curve file must be sampled on [0, t]");
  }
  if (curve.dim() != problem.dim()) throw ConfigError("curve dimension disagrees with the model");
  curve.s.back() = t;

  std::vector<double> eps = m.epsilons;
  if (eps.empty() && cfg.study) eps = cfg.study->epsilons;
  if (eps.empty()) {
    for (int i = 0; i <= 5; ++i) eps.push_back(t / 8.0 / (1 << i));
  }
  double minimizer = 0.0;
  if (m.minimizer_action) {
    minimizer = *m.minimizer_action;
  } else {
    minimizer = run_solver(problem, cfg.solver).action;
  }
  const MollificationStudy s = mollification_study(problem, curve, eps, minimizer, m.extension);
  Payload p;
  p.doc = mollification_json(s);
  p.doc["model"] = model_json(problem.model());
  p.doc["problem"] = problem_json(problem);
  p.doc["extension"] = m.extension == Extension::reflect ? "reflect" : "constant";
  p.csv = mollification_csv(s);
  p.exit_code = s.all_dominated ? kSuccess : kNumericalFailure;
  p.summary = fmt::format("mollify: raw_action={} minimizer_action={} all_dominated={} decreasing={}",
                          format_double(s.raw_action), format_double(s.minimizer_action),
                          s.all_dominated, s.differences_decreasing);
  return p;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Discrete action minimization and polygon convergence studies", "varmin"};
  app.require_subcommand(1);
  Invocation inv;
  std::string selected;
  for (const char* name : {"solve", "converge", "verify", "mollify"}) {
    static const std::map<std::string, std::string> help{
        {"solve", "Minimize the discrete action at one K"},
        {"converge", "Refinement study over K0 2^j"},
        {"verify", "Check model conditions, Legendre roundtrip and gradients"},
        {"mollify", "Mollification study of a curve file"}};
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("-c,--config", inv.config, "JSON config file")->required();
    sub->add_option("-o,--out", inv.out, "Output path (default: stdout)");
    sub->add_option("--format", inv.format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_flag("--quiet", inv.quiet, "Suppress the summary");
    sub->callback([&selected, name] { selected = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, log);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    const RunConfig cfg = load_config(inv.config);
    Payload p;
    if (selected == "solve") {
      p = cmd_solve(cfg);
    } else if (selected == "converge") {
      p = cmd_converge(cfg);
    } else if (selected == "verify") {
      p = cmd_verify(cfg);
    } else {
      p = cmd_mollify(cfg);
    }
    emit(p, cfg, inv, out);
    if (!inv.quiet) log << p.summary << '\n';
    return p.exit_code;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const LookupError& e) {
    log << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ModelDefinitionError& e) {
    log << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ContractError& e) {
    log << "invalid request: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace varmin::cli
