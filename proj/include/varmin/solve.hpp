#pragma once

#include "varmin/discrete.hpp"

#include <string>
#include <vector>

namespace varmin {

enum class InitStrategy { constant, straight_line };
enum class Method { newton, gradient };

InitStrategy parse_init_strategy(const std::string& s);
Method parse_method(const std::string& s);
std::string to_string(InitStrategy s);
std::string to_string(Method m);

struct SolveOptions {
  double tol_grad = 1e-10;
  int max_iter = 200;
  Method method = Method::newton;
  double armijo_c = 1e-4;
  int max_halvings = 60;
};

struct SolveDiagnostics {
  /// Action after each accepted iterate, starting with the initial path.
  std::vector<double> action_history;
  int newton_steps = 0;
  int gradient_steps = 0;
  /// Iterations where the Newton system was singular or not a descent direction.
  int fallbacks = 0;
  /// The line search could not decrease the action any further.
  bool stalled = false;
};

struct SolveResult {
  DiscretePath path;
  MomentumPath momenta;
  double action = 0.0;
  double grad_norm = 0.0;  // max-norm
  int iterations = 0;
  bool converged = false;
  BoundsCertificate certificate;
  SolveDiagnostics diagnostics;
};

/// Constant path at x (Bolza only) or the straight segment from the start
/// point to x (Bolza: the constant path again).
DiscretePath initial_guess(const Problem& problem, int K, InitStrategy strategy);

/// The Newton direction -H^{-1} g at `path`, or nullopt if the block
/// tridiagonal system is singular.
std::optional<Vec> newton_direction(const Problem& problem, const DiscretePath& path);

/// Minimizes the discrete action over the free nodes. Non-convergence is
/// reported in the result, not thrown.
SolveResult minimize_discrete(const Problem& problem, int K, const DiscretePath& init,
                              const SolveOptions& opts = {});

/// |z_0 - grad w(y_0)| in max-norm. Bolza problems only.
double transversality_residual(const Problem& problem, const SolveResult& result);

}  // namespace varmin
