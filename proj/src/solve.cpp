#include "varmin/solve.hpp"

#include <cmath>
#include <limits>

namespace varmin {

InitStrategy parse_init_strategy(const std::string& s) {
  if (s == "constant") return InitStrategy::constant;
  if (s == "straight_line") return InitStrategy::straight_line;
  throw ContractError("unknown init strategy '" + s + "' (expected constant or straight_line)");
}

Method parse_method(const std::string& s) {
  if (s == "newton") return Method::newton;
  if (s == "gradient") return Method::gradient;
  throw ContractError("unknown method '" + s + "' (expected newton or gradient)");
}

std::string to_string(InitStrategy s) {
  return s == InitStrategy::constant ? "constant" : "straight_line";
}

std::string to_string(Method m) { return m == Method::newton ? "newton" : "gradient"; }

DiscretePath initial_guess(const Problem& problem, int K, InitStrategy strategy) {
  if (strategy == InitStrategy::constant && problem.is_two_point()) {
    throw ContractError("initial_guess: the constant strategy needs a free left endpoint (Bolza)");
  }
  return comparison_path(problem, K);
}

std::optional<Vec> newton_direction(const Problem& problem, const DiscretePath& path) {
  const Vec g = discrete_gradient(problem, path);
  const BlockTridiagonal hess = discrete_hessian(problem, path);
  auto step = solve_block_tridiagonal(hess, g);
  if (!step) return std::nullopt;
  return Vec(-*step);
}

namespace {

double max_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Trial {
  std::optional<DiscretePath> path;
  double action = std::numeric_limits<double>::infinity();
};

Trial evaluate(const Problem& problem, int K, const Vec& free) {
  Trial t;
  if (!free.allFinite()) return t;
  try {
    DiscretePath p = DiscretePath::from_free(problem, K, free);
    t.action = discrete_action(problem, p);
    t.path = std::move(p);
  } catch (const ModelEvaluationError&) {
    t.action = std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace

SolveResult minimize_discrete(const Problem& problem, int K, const DiscretePath& init,
                              const SolveOptions& opts) {
  if (!(opts.tol_grad > 0.0)) throw ContractError("minimize_discrete: tol_grad must be positive");
  if (opts.max_iter < 0) throw ContractError("minimize_discrete: max_iter must be >= 0");
  check_path(problem, init);
  if (init.K() != K) throw ContractError("minimize_discrete: initial path has a different K");

  DiscretePath path = init;
  double f = discrete_action(problem, path);
  Vec g = discrete_gradient(problem, path);
  double gnorm = max_norm(g);
  SolveDiagnostics diag;
  diag.action_history.push_back(f);
  int iter = 0;
  bool converged = false;

  // Each iteration begins with the convergence test, so a converged result
  // always reports a gradient checked within the iteration budget.
  while (iter < opts.max_iter) {
    ++iter;
    if (gnorm <= opts.tol_grad) {
      converged = true;
      break;
    }
    Vec dir;
    bool newton = false;
    if (opts.method == Method::newton) {
      if (auto d = newton_direction(problem, path); d && g.dot(*d) < 0.0) {
        dir = std::move(*d);
        newton = true;
      } else {
        ++diag.fallbacks;
      }
    }
    if (!newton) dir = -g;

    const Vec y = path.free_vector();
    const double slope = g.dot(dir);
    double step = 1.0;
    std::optional<Trial> accepted;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, step *= 0.5) {
      Trial t = evaluate(problem, K, y + step * dir);
      if (t.path && t.action <= f + opts.armijo_c * step * slope) {
        accepted = std::move(t);
        break;
      }
    }
    if (!accepted) {
      // Predicted decrease below the rounding level of the action: take the
      // full step if it reduces the gradient.
      if (std::abs(slope) <= 1e-12 * (1.0 + std::abs(f))) {
        Trial t = evaluate(problem, K, y + dir);
        if (t.path && max_norm(discrete_gradient(problem, *t.path)) < gnorm) accepted = std::move(t);
      }
    }
    if (!accepted) {
      diag.stalled = true;
      break;
    }
    path = std::move(*accepted->path);
    f = accepted->action;
    g = discrete_gradient(problem, path);
    gnorm = max_norm(g);
    diag.action_history.push_back(f);
    if (newton) {
      ++diag.newton_steps;
    } else {
      ++diag.gradient_steps;
    }
  }

  MomentumPath momenta = discrete_momenta(problem.model(), path);
  BoundsCertificate cert = bounds_certificate(problem, path);
  return SolveResult{std::move(path), std::move(momenta), f,        gnorm,
                     iter,           converged,                std::move(cert), std::move(diag)};
}

double transversality_residual(const Problem& problem, const SolveResult& result) {
  if (!problem.is_bolza()) {
    throw ContractError("transversality_residual: only defined for Bolza problems");
  }
  const Vec& y0 = result.path.node(0);
  const Vec& z0 = result.momenta.z.at(0);
  return (z0 - problem.terminal_cost().gradient(y0)).cwiseAbs().maxCoeff();
}

}  // namespace varmin
