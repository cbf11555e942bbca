#pragma once

#include "varmin/model.hpp"

#include <optional>

namespace varmin {

/// Result of maximizing p.xi - L(x, t, xi) over xi.
struct ConjugateResult {
  Vec xi;           // maximizer, equal to dH/dp
  double H = 0.0;   // p.xi - L
  Vec dH_dp;
  Vec dH_dx;        // -dL/dx at the maximizer
  int newton_iters = 0;
  double residual = 0.0;  // |dL/dxi(x, t, xi) - p|
};

struct ConjugateOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Solves dL/dxi(x, t, xi) = p by damped Newton iteration started at `guess`
/// (default: xi = p). Throws ConjugateSolveError when the tolerance is not
/// met and ConditionViolationError when the velocity Hessian is singular.
ConjugateResult conjugate_velocity(const LagrangianModel& model, const Vec& x, double t,
                                   const Vec& p, const std::optional<Vec>& guess = std::nullopt,
                                   const ConjugateOptions& opts = {});

/// |xi(x, t, dL/dxi(x, t, xi)) - xi|.
double roundtrip_residual(const LagrangianModel& model, const Vec& x, double t, const Vec& xi,
                          const ConjugateOptions& opts = {});

}  // namespace varmin
