#include "varmin/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <sstream>

namespace varmin {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json params_json(const Params& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

json nodes_json(const std::vector<Vec>& nodes) {
  json j = json::array();
  for (const Vec& v : nodes) j.push_back(to_json(v));
  return j;
}

}  // namespace

json to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(number(v[i]));
  return j;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json model_json(const LagrangianModel& model) {
  return {{"name", model.name()},
          {"dim", model.dim()},
          {"params", params_json(model.params())},
          {"exact_superlinearity", model.has_exact_superlinearity()}};
}

json problem_json(const Problem& problem) {
  json j{{"kind", problem.is_bolza() ? "bolza" : "two_point"},
         {"t", problem.horizon()},
         {"end", to_json(problem.end())}};
  if (problem.is_two_point()) {
    j["start"] = to_json(problem.start());
  } else {
    const TerminalCost& w = problem.terminal_cost();
    j["terminal_cost"] = {{"type", w.name()},
                          {"alpha", w.alpha()},
                          {"beta", w.beta()},
                          {"params", params_json(w.params())}};
  }
  return j;
}

json certificate_json(const BoundsCertificate& c) {
  return {{"C_x", number(c.C_x)},
          {"R1", number(c.R1)},
          {"R2", number(c.R2)},
          {"k_star", c.k_star},
          {"min_slope", number(c.min_slope)},
          {"max_node_norm", number(c.max_node_norm)},
          {"momentum_at_k_star", number(c.momentum_at_k_star)},
          {"action", number(c.action)},
          {"holds", c.holds},
          {"approximate", c.approximate},
          {"cx_at_given_K", c.cx_at_given_K},
          {"cx_overridden", c.cx_overridden},
          {"comparison", c.comparison}};
}

json condition_report_json(const ConditionReport& r) {
  json checks = json::array();
  for (const ConditionCheck& c : r.checks) {
    json item{{"name", c.name},
              {"pass", c.pass},
              {"worst_violation", number(c.worst_violation)},
              {"extreme", number(c.extreme)}};
    if (c.witness) {
      item["witness"] = {{"x", to_json(c.witness->x)}, {"t", c.witness->t}, {"xi", to_json(c.witness->xi)}};
    }
    checks.push_back(std::move(item));
  }
  json b = json::array();
  for (const auto& [a, value] : r.b_values) b.push_back({{"a", a}, {"b", number(value)}});
  return {{"pass", r.pass()},
          {"checks", checks},
          {"min_hessian_eigenvalue", number(r.min_hessian_eigenvalue)},
          {"worst_superlinearity_slack", number(r.worst_superlinearity_slack)},
          {"worst_terminal_slack", optional_number(r.worst_terminal_slack)},
          {"b_values", b},
          {"superlinearity_approximate", r.superlinearity_approximate}};
}

json solve_result_json(const Problem& problem, const SolveResult& r) {
  const SolveDiagnostics& d = r.diagnostics;
  return {{"schema_version", kSchemaVersion},
          {"command", "solve"},
          {"model", model_json(problem.model())},
          {"problem", problem_json(problem)},
          {"K", r.path.K()},
          {"h", r.path.grid().h()},
          {"action", number(r.action)},
          {"grad_norm", number(r.grad_norm)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"certificate", certificate_json(r.certificate)},
          {"nodes", nodes_json(r.path.nodes())},
          {"momenta", nodes_json(r.momenta.z)},
          {"diagnostics",
           {{"newton_steps", d.newton_steps},
            {"gradient_steps", d.gradient_steps},
            {"fallbacks", d.fallbacks},
            {"stalled", d.stalled}}}};
}

json convergence_report_json(const ConvergenceReport& r) {
  json levels = json::array();
  for (const LevelRecord& l : r.levels) {
    levels.push_back({{"K", l.K},
                      {"h", l.h},
                      {"action", number(l.action)},
                      {"grad_norm", number(l.grad_norm)},
                      {"iterations", l.iterations},
                      {"converged", l.converged},
                      {"hamilton_residual", number(l.hamilton_residual)},
                      {"el_residual", number(l.el_residual)},
                      {"polygon_action", number(l.polygon_action)},
                      {"polygon_distance_to_next", optional_number(l.distance_to_next)},
                      {"distance_to_oracle", optional_number(l.distance_to_oracle)}});
  }
  json orders = json::array();
  for (double o : r.observed_orders) orders.push_back(number(o));
  json el_orders = json::array();
  for (double o : r.el_orders) el_orders.push_back(number(o));
  return {{"schema_version", kSchemaVersion},
          {"command", "converge"},
          {"levels", levels},
          {"observed_orders", orders},
          {"el_orders", el_orders},
          {"verdict", to_string(r.verdict)},
          {"truncated", r.truncated},
          {"anchor", {{"k", r.anchor_k}, {"t", r.anchor_t}}},
          {"note", r.note}};
}

json mollification_json(const MollificationStudy& s) {
  json rows = json::array();
  for (const MollificationRow& r : s.rows) {
    rows.push_back({{"eps", r.eps},
                    {"action", number(r.action)},
                    {"difference", number(r.difference)},
                    {"dominated", r.dominated},
                    {"endpoint_error", number(r.endpoint_error)},
                    {"max_slope", number(r.max_slope)},
                    {"first_variation", number(r.first_variation)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"command", "mollify"},
          {"raw_action", number(s.raw_action)},
          {"minimizer_action", number(s.minimizer_action)},
          {"rows", rows},
          {"all_dominated", s.all_dominated},
          {"differences_decreasing", s.differences_decreasing}};
}

std::string path_csv(const DiscretePath& path, const MomentumPath& momenta) {
  if (static_cast<int>(momenta.z.size()) != path.K()) {
    throw ContractError("path_csv: momenta length does not match the path");
  }
  const int d = path.dim();
  std::string out = "k,t_k";
  for (int i = 0; i < d; ++i) out += fmt::format(",y{}", i);
  for (int i = 0; i < d; ++i) out += fmt::format(",z{}", i);
  out += '\n';
  for (int k = 0; k <= path.K(); ++k) {
    out += fmt::format("{},{}", k, format_double(path.grid().node(k)));
    for (int i = 0; i < d; ++i) out += "," + format_double(path.node(k)[i]);
    const Vec& z = momenta.z[std::min(k, path.K() - 1)];
    for (int i = 0; i < d; ++i) out += "," + format_double(z[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string convergence_csv(const ConvergenceReport& r) {
  std::string out =
      "K,h,action,grad_norm,iterations,hamilton_residual,el_residual,polygon_action,"
      "polygon_distance_to_next,distance_to_oracle\n";
  for (const LevelRecord& l : r.levels) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", l.K, format_double(l.h), format_double(l.action),
                       format_double(l.grad_norm), l.iterations, format_double(l.hamilton_residual),
                       format_double(l.el_residual), format_double(l.polygon_action),
                       opt_str(l.distance_to_next), opt_str(l.distance_to_oracle));
  }
  return out;
}

std::string convergence_table(const ConvergenceReport& r) {
  std::string out = fmt::format("{:>8} {:>12} {:>18} {:>10} {:>10} {:>12} {:>12} {:>8}\n", "K", "h",
                                "action", "grad", "hamilton", "dist_next", "dist_oracle", "order");
  for (std::size_t j = 0; j < r.levels.size(); ++j) {
    const LevelRecord& l = r.levels[j];
    const std::string order =
        j > 0 && j - 1 < r.observed_orders.size() ? fmt::format("{:.3f}", r.observed_orders[j - 1]) : "";
    out += fmt::format("{:>8} {:>12.5e} {:>18.12f} {:>10.2e} {:>10.2e} {:>12} {:>12} {:>8}\n", l.K, l.h,
                       l.action, l.grad_norm, l.hamilton_residual,
                       l.distance_to_next ? fmt::format("{:.4e}", *l.distance_to_next) : "-",
                       l.distance_to_oracle ? fmt::format("{:.4e}", *l.distance_to_oracle) : "-", order);
  }
  out += fmt::format("verdict: {}{}\n", to_string(r.verdict), r.note.empty() ? "" : " (" + r.note + ")");
  return out;
}

std::string mollification_csv(const MollificationStudy& s) {
  std::string out = "eps,action,difference,dominated,endpoint_error,max_slope,first_variation\n";
  for (const MollificationRow& r : s.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", format_double(r.eps), format_double(r.action),
                       format_double(r.difference), r.dominated ? 1 : 0, format_double(r.endpoint_error),
                       format_double(r.max_slope), format_double(r.first_variation));
  }
  return out;
}

std::string curve_csv(const SampledCurve& curve) {
  curve.validate();
  const int d = curve.dim();
  const bool with_dy = curve.has_derivatives();
  std::string out = "s";
  for (int i = 0; i < d; ++i) out += fmt::format(",y{}", i);
  if (with_dy) {
    for (int i = 0; i < d; ++i) out += fmt::format(",dy{}", i);
  }
  out += '\n';
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out += format_double(curve.s[k]);
    for (int i = 0; i < d; ++i) out += "," + format_double(curve.y[k][i]);
    if (with_dy) {
      for (int i = 0; i < d; ++i) out += "," + format_double(curve.dy[k][i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("curve csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
}

}  // namespace

SampledCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("curve csv: empty input");
  const std::vector<std::string> header = split(line);

  std::size_t time_col = 0;
  std::vector<std::size_t> y_cols;
  std::vector<std::size_t> dy_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "s" || h == "t_k") {
      time_col = c;
    } else if (h.size() > 1 && h[0] == 'y' && std::isdigit(static_cast<unsigned char>(h[1]))) {
      y_cols.push_back(c);
    } else if (h.size() > 2 && h.rfind("dy", 0) == 0 && std::isdigit(static_cast<unsigned char>(h[2]))) {
      dy_cols.push_back(c);
    }
  }
  const bool has_time = !header.empty() && (header[time_col] == "s" || header[time_col] == "t_k");
  if (!has_time || y_cols.empty()) throw ConfigError("curve csv: header needs 's' (or 't_k') and y0..");
  if (!dy_cols.empty() && dy_cols.size() != y_cols.size()) {
    throw ConfigError("curve csv: derivative columns must match position columns");
  }

  SampledCurve curve;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw ConfigError("curve csv line " + std::to_string(line_no) + ": wrong number of columns");
    }
    curve.s.push_back(parse_cell(cells[time_col], line_no));
    Vec y(static_cast<Eigen::Index>(y_cols.size()));
    for (std::size_t i = 0; i < y_cols.size(); ++i) y[static_cast<Eigen::Index>(i)] = parse_cell(cells[y_cols[i]], line_no);
    curve.y.push_back(y);
    if (!dy_cols.empty()) {
      Vec dy(static_cast<Eigen::Index>(dy_cols.size()));
      for (std::size_t i = 0; i < dy_cols.size(); ++i) dy[static_cast<Eigen::Index>(i)] = parse_cell(cells[dy_cols[i]], line_no);
      curve.dy.push_back(dy);
    }
  }
  if (curve.size() < 3) throw ConfigError("curve csv: need at least three samples");
  try {
    curve.validate();
  } catch (const ContractError& e) {
    throw ConfigError(std::string("curve csv: ") + e.what());
  }
  if (!curve.uniform()) throw ConfigError("curve csv: samples must be uniformly spaced");
  return curve;
}

Revalidation revalidate_solve_result(const json& result, const Problem& problem) {
  try {
    std::vector<Vec> nodes;
    for (const json& n : result.at("nodes")) nodes.push_back(vec_from_json(n));
    const DiscretePath path = DiscretePath::from_nodes(problem, std::move(nodes));
    Revalidation r;
    r.stored_action = result.at("action").get<double>();
    r.stored_grad_norm = result.at("grad_norm").get<double>();
    r.action = discrete_action(problem, path);
    const Vec g = discrete_gradient(problem, path);
    r.grad_norm = g.cwiseAbs().maxCoeff();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solve result: ") + e.what());
  }
}

}  // namespace varmin
