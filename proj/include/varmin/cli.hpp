#pragma once

#include "varmin/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace varmin::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2 };

struct ModelSpec {
  std::string name;
  Params params;
  int dim = 1;
  // "quadratic" user models
  std::optional<Mat> mass_matrix;
  std::optional<Mat> stiffness;
};

struct TerminalSpec {
  std::string type = "zero";  // zero | quadratic | linear
  double weight = 1.0;
  std::optional<Vec> center;
  std::optional<Vec> slope;
};

struct ProblemSpec {
  std::string kind = "two_point";  // two_point | bolza
  double t = 1.0;
  std::optional<Vec> start;
  Vec end;
  TerminalSpec terminal_cost;
};

struct SolverSpec {
  int K = 64;
  double tol_grad = 1e-10;
  int max_iter = 200;
  std::optional<InitStrategy> init;
  Method method = Method::newton;
};

struct StudySpec {
  int K0 = 16;
  int levels = 6;
  std::vector<double> epsilons;
};

struct VerifySpec {
  int n_samples = 1000;
  double box_lo = -5.0;
  double box_hi = 5.0;
  std::uint64_t seed = 0x5eed;
  int fd_paths = 20;
  std::vector<int> fd_K{4, 32};
};

struct MollifySpec {
  std::string curve;
  std::vector<double> epsilons;
  std::optional<double> minimizer_action;
  Extension extension = Extension::reflect;
};

struct OutputSpec {
  std::optional<std::string> path;
  std::string format = "json";
};

/// Parsed config document (schema_version 1).
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::optional<ModelSpec> model;
  std::optional<ProblemSpec> problem;
  SolverSpec solver;
  std::optional<StudySpec> study;
  VerifySpec verify;
  std::optional<MollifySpec> mollify;
  OutputSpec output;
  std::filesystem::path base_dir;
};

/// Throws ConfigError on any schema violation.
RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

LagrangianModel build_model(const ModelSpec& spec);
/// Throws ConfigError when the config has no problem or dimensions disagree.
Problem build_problem(const RunConfig& cfg);

/// Entry point of the varmin executable. Human-readable summaries go to
/// `log`; payloads go to the output file, or to `out` when none is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace varmin::cli
