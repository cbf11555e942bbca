#pragma once

#include "varmin/analysis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace varmin {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Decimal form with 17 significant digits.
std::string format_double(double v);

json to_json(const Vec& v);
Vec vec_from_json(const json& j);

json model_json(const LagrangianModel& model);
json problem_json(const Problem& problem);
json certificate_json(const BoundsCertificate& c);
json condition_report_json(const ConditionReport& r);
json solve_result_json(const Problem& problem, const SolveResult& r);
json convergence_report_json(const ConvergenceReport& r);
json mollification_json(const MollificationStudy& s);

/// Columns k, t_k, y0..y{d-1}, z0..z{d-1}; the momentum of the last row
/// repeats z_{K-1}.
std::string path_csv(const DiscretePath& path, const MomentumPath& momenta);
std::string convergence_csv(const ConvergenceReport& r);
std::string convergence_table(const ConvergenceReport& r);
std::string mollification_csv(const MollificationStudy& s);

/// Columns s, y0.., and dy0.. when derivatives are present.
std::string curve_csv(const SampledCurve& curve);

/// Reads a curve from CSV. Accepted headers: "s,y0,..[,dy0,..]" or the path
/// format "k,t_k,y0,..,z0,..". Throws ConfigError on malformed input.
SampledCurve read_curve_csv(std::istream& in);

/// Rebuilds the path stored in a solve result and recomputes its action and
/// gradient norm.
struct Revalidation {
  double stored_action = 0.0;
  double stored_grad_norm = 0.0;
  double action = 0.0;
  double grad_norm = 0.0;
  bool bit_exact() const noexcept { return stored_action == action && stored_grad_norm == grad_norm; }
};
Revalidation revalidate_solve_result(const json& result, const Problem& problem);

}  // namespace varmin
