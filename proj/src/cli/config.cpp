#include "varmin/cli.hpp"

#include <fstream>
#include <set>

namespace varmin::cli {

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Vec get_vec(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (v.is_number()) return Vec::Constant(1, v.get<double>());
  try {
    return vec_from_json(v);
  } catch (const ConfigError& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Mat get_matrix(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected a nonempty matrix");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Mat m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec row = vec_from_json(v[static_cast<std::size_t>(i)]);
    if (i == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) throw ConfigError(where + "." + key + ": ragged matrix");
    m.row(i) = row.transpose();
  }
  return m;
}

std::vector<double> get_list(const json& obj, const std::string& key, const std::string& where) {
  const Vec v = get_vec(obj, key, where);
  return {v.data(), v.data() + v.size()};
}

ModelSpec parse_model(const json& j) {
  check_keys(j, "model", {"name", "params", "dim", "mass_matrix", "stiffness"});
  if (!j.contains("name")) throw ConfigError("model.name is required");
  ModelSpec m;
  m.name = get_string(j, "name", "model");
  if (j.contains("dim")) m.dim = get_int(j, "dim", "model");
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) throw ConfigError("model.params: expected an object");
    for (const auto& [key, value] : p.items()) {
      if (!value.is_number()) throw ConfigError("model.params." + key + ": expected a number");
      m.params[key] = value.get<double>();
    }
  }
  if (m.name == "quadratic") {
    if (!j.contains("mass_matrix")) throw ConfigError("model 'quadratic' requires mass_matrix");
    m.mass_matrix = get_matrix(j, "mass_matrix", "model");
    m.stiffness = j.contains("stiffness") ? get_matrix(j, "stiffness", "model")
                                          : Mat::Zero(m.mass_matrix->rows(), m.mass_matrix->cols());
    if (j.contains("dim") && m.dim != m.mass_matrix->rows()) {
      throw ConfigError("model.dim disagrees with mass_matrix");
    }
    m.dim = static_cast<int>(m.mass_matrix->rows());
  } else if (j.contains("mass_matrix") || j.contains("stiffness")) {
    throw ConfigError("mass_matrix/stiffness are only accepted for model 'quadratic'");
  }
  if (m.dim < 1) throw ConfigError("model.dim must be >= 1");
  return m;
}

TerminalSpec parse_terminal(const json& j) {
  check_keys(j, "problem.terminal_cost", {"type", "weight", "center", "slope"});
  TerminalSpec w;
  if (j.contains("type")) w.type = get_string(j, "type", "problem.terminal_cost");
  if (w.type != "zero" && w.type != "quadratic" && w.type != "linear") {
    throw ConfigError("problem.terminal_cost.type must be zero, quadratic or linear");
  }
  if (j.contains("weight")) w.weight = get_number(j, "weight", "problem.terminal_cost");
  if (j.contains("center")) w.center = get_vec(j, "center", "problem.terminal_cost");
  if (j.contains("slope")) w.slope = get_vec(j, "slope", "problem.terminal_cost");
  if (w.type == "linear" && !w.slope) throw ConfigError("linear terminal cost requires slope");
  return w;
}

ProblemSpec parse_problem(const json& j) {
  check_keys(j, "problem", {"kind", "t", "start", "end", "terminal_cost"});
  ProblemSpec p;
  if (j.contains("kind")) p.kind = get_string(j, "kind", "problem");
  if (p.kind != "two_point" && p.kind != "bolza") {
    throw ConfigError("problem.kind must be two_point or bolza");
  }
  if (j.contains("t")) p.t = get_number(j, "t", "problem");
  if (!(p.t > 0.0)) throw ConfigError("problem.t must be positive");
  if (!j.contains("end")) throw ConfigError("problem.end is required");
  p.end = get_vec(j, "end", "problem");
  if (p.kind == "two_point") {
    if (!j.contains("start")) throw ConfigError("two_point problems require problem.start");
    if (j.contains("terminal_cost")) throw ConfigError("two_point problems take no terminal_cost");
    p.start = get_vec(j, "start", "problem");
  } else {
    if (j.contains("start")) throw ConfigError("bolza problems have a free start; remove problem.start");
    if (j.contains("terminal_cost")) p.terminal_cost = parse_terminal(j.at("terminal_cost"));
  }
  return p;
}

SolverSpec parse_solver(const json& j) {
  check_keys(j, "solver", {"K", "tol_grad", "max_iter", "init", "method"});
  SolverSpec s;
  if (j.contains("K")) s.K = get_int(j, "K", "solver");
  if (j.contains("tol_grad")) s.tol_grad = get_number(j, "tol_grad", "solver");
  if (j.contains("max_iter")) s.max_iter = get_int(j, "max_iter", "solver");
  try {
    if (j.contains("init")) s.init = parse_init_strategy(get_string(j, "init", "solver"));
    if (j.contains("method")) s.method = parse_method(get_string(j, "method", "solver"));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  if (s.K < 2) throw ConfigError("solver.K must be >= 2");
  if (!(s.tol_grad > 0.0)) throw ConfigError("solver.tol_grad must be positive");
  if (s.max_iter < 0) throw ConfigError("solver.max_iter must be >= 0");
  return s;
}

StudySpec parse_study(const json& j) {
  check_keys(j, "study", {"K0", "levels", "epsilons"});
  StudySpec s;
  if (j.contains("K0")) s.K0 = get_int(j, "K0", "study");
  if (j.contains("levels")) s.levels = get_int(j, "levels", "study");
  if (j.contains("epsilons")) s.epsilons = get_list(j, "epsilons", "study");
  if (s.K0 < 2) throw ConfigError("study.K0 must be >= 2");
  if (s.levels < 2) throw ConfigError("study.levels must be >= 2 (a refinement needs two levels)");
  if (s.levels > 24) throw ConfigError("study.levels must be <= 24");
  return s;
}

VerifySpec parse_verify(const json& j) {
  check_keys(j, "verify", {"n_samples", "box", "seed", "fd_paths", "fd_K"});
  VerifySpec v;
  if (j.contains("n_samples")) v.n_samples = get_int(j, "n_samples", "verify");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("verify.seed: expected a non-negative integer");
    v.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("box")) {
    const std::vector<double> box = get_list(j, "box", "verify");
    if (box.size() != 2 || !(box[0] < box[1])) throw ConfigError("verify.box must be [lo, hi] with lo < hi");
    v.box_lo = box[0];
    v.box_hi = box[1];
  }
  if (j.contains("fd_paths")) v.fd_paths = get_int(j, "fd_paths", "verify");
  if (j.contains("fd_K")) {
    v.fd_K.clear();
    for (double k : get_list(j, "fd_K", "verify")) {
      if (k != static_cast<int>(k) || k < 2) throw ConfigError("verify.fd_K entries must be integers >= 2");
      v.fd_K.push_back(static_cast<int>(k));
    }
  }
  if (v.n_samples < 1) throw ConfigError("verify.n_samples must be >= 1");
  if (v.fd_paths < 0) throw ConfigError("verify.fd_paths must be >= 0");
  return v;
}

MollifySpec parse_mollify(const json& j) {
  check_keys(j, "mollify", {"curve", "epsilons", "minimizer_action", "extension"});
  MollifySpec m;
  if (!j.contains("curve")) throw ConfigError("mollify.curve is required");
  m.curve = get_string(j, "curve", "mollify");
  if (j.contains("epsilons")) m.epsilons = get_list(j, "epsilons", "mollify");
  if (j.contains("minimizer_action")) m.minimizer_action = get_number(j, "minimizer_action", "mollify");
  if (j.contains("extension")) {
    const std::string e = get_string(j, "extension", "mollify");
    if (e == "reflect") {
      m.extension = Extension::reflect;
    } else if (e == "constant") {
      m.extension = Extension::constant;
    } else {
      throw ConfigError("mollify.extension must be reflect or constant");
    }
  }
  return m;
}

OutputSpec parse_output(const json& j) {
  check_keys(j, "output", {"path", "format"});
  OutputSpec o;
  if (j.contains("path")) o.path = get_string(j, "path", "output");
  if (j.contains("format")) o.format = get_string(j, "format", "output");
  if (o.format != "json" && o.format != "csv" && o.format != "both") {
    throw ConfigError("output.format must be json, csv or both");
  }
  return o;
}

void check_dim(const Vec& v, int d, const std::string& what) {
  if (v.size() != d) {
    throw ConfigError(what + " has dimension " + std::to_string(v.size()) + ", model dimension is " +
                      std::to_string(d));
  }
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  try {
    check_keys(doc, "config",
               {"schema_version", "model", "problem", "solver", "study", "verify", "mollify", "output"});
    if (!doc.contains("schema_version")) throw ConfigError("schema_version is required");
    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.schema_version = get_int(doc, "schema_version", "config");
    if (cfg.schema_version != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
    }
    if (doc.contains("model")) cfg.model = parse_model(doc.at("model"));
    if (doc.contains("problem")) cfg.problem = parse_problem(doc.at("problem"));
    if (doc.contains("solver")) cfg.solver = parse_solver(doc.at("solver"));
    if (doc.contains("study")) cfg.study = parse_study(doc.at("study"));
    if (doc.contains("verify")) cfg.verify = parse_verify(doc.at("verify"));
    if (doc.contains("mollify")) cfg.mollify = parse_mollify(doc.at("mollify"));
    if (doc.contains("output")) cfg.output = parse_output(doc.at("output"));

    if (cfg.problem && !cfg.model) throw ConfigError("problem given without a model");
    if (cfg.model && cfg.model->name != "quadratic") {
      // Resolve early so unknown names and parameters fail at parse time.
      build_model(*cfg.model);
    }
    if (cfg.problem) {
      const int d = cfg.model->dim;
      check_dim(cfg.problem->end, d, "problem.end");
      if (cfg.problem->start) check_dim(*cfg.problem->start, d, "problem.start");
      const TerminalSpec& w = cfg.problem->terminal_cost;
      if (w.center) check_dim(*w.center, d, "terminal_cost.center");
      if (w.slope) check_dim(*w.slope, d, "terminal_cost.slope");
      if (cfg.solver.init == InitStrategy::constant && cfg.problem->kind == "two_point") {
        throw ConfigError("solver.init constant is only valid for bolza problems");
      }
    }
    const double t = cfg.problem ? cfg.problem->t : 0.0;
    auto check_eps = [&](const std::vector<double>& eps, const std::string& where) {
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ConfigError(where + ": epsilons must be positive");
        if (cfg.problem && !(eps[i] < t / 4.0)) {
          throw ConfigError(where + ": epsilon " + format_double(eps[i]) + " must be below t/4");
        }
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError(where + ": epsilons must decrease");
      }
    };
    if (cfg.study) check_eps(cfg.study->epsilons, "study");
    if (cfg.mollify) check_eps(cfg.mollify->epsilons, "mollify");
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const LookupError& e) {
    throw ConfigError(e.what());
  } catch (const ModelDefinitionError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

LagrangianModel build_model(const ModelSpec& spec) {
  if (spec.name == "quadratic") {
    if (!spec.mass_matrix || !spec.stiffness) throw ConfigError("quadratic model requires matrices");
    return make_quadratic_model("quadratic", *spec.mass_matrix, *spec.stiffness);
  }
  return catalog_lookup(spec.name, spec.params, spec.dim);
}

Problem build_problem(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("config has no model");
  if (!cfg.problem) throw ConfigError("config has no problem");
  LagrangianModel model = build_model(*cfg.model);
  const ProblemSpec& p = *cfg.problem;
  if (p.kind == "two_point") return Problem::two_point(std::move(model), p.t, *p.start, p.end);
  const TerminalSpec& w = p.terminal_cost;
  const int d = cfg.model->dim;
  TerminalCost cost = TerminalCost::zero(d);
  if (w.type == "quadratic") cost = TerminalCost::quadratic(w.weight, w.center.value_or(Vec::Zero(d)));
  if (w.type == "linear") cost = TerminalCost::linear(*w.slope);
  return Problem::bolza(std::move(model), p.t, p.end, std::move(cost));
}

}  // namespace varmin::cli
