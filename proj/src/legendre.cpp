#include "varmin/legendre.hpp"

#include <cmath>
#include <string>

namespace varmin {

ConjugateResult conjugate_velocity(const LagrangianModel& model, const Vec& x, double t,
                                   const Vec& p, const std::optional<Vec>& guess,
                                   const ConjugateOptions& opts) {
  if (!(opts.tol > 0.0)) throw ContractError("conjugate_velocity: tol must be positive");
  if (p.size() != model.dim()) throw ContractError("conjugate_velocity: momentum dimension mismatch");

  Vec xi = guess.value_or(p);
  LagrangianEval e = model.eval(x, t, xi);
  Vec r = e.dxi - p;
  double res = r.norm();
  int iters = 0;

  while (res > opts.tol) {
    if (iters == opts.max_iter) {
      throw ConjugateSolveError("conjugate_velocity: no convergence after " +
                                    std::to_string(opts.max_iter) + " iterations at x=" +
                                    format_point(x) + ", p=" + format_point(p) +
                                    " (residual " + std::to_string(res) + ")",
                                res);
    }
    Eigen::LDLT<Mat> ldlt(e.hess_xi);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 0.0) {
      throw ConditionViolationError("conjugate_velocity: velocity Hessian not positive definite at x=" +
                                    format_point(x) + ", xi=" + format_point(xi));
    }
    const Vec step = ldlt.solve(r);
    ++iters;

    // Halve the step until the residual decreases.
    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Vec trial = xi - lambda * step;
      const LagrangianEval et = model.eval(x, t, trial);
      const Vec rt = et.dxi - p;
      const double rest = rt.norm();
      if (rest < res) {
        xi = trial;
        e = et;
        r = rt;
        res = rest;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      throw ConjugateSolveError("conjugate_velocity: Newton stalled at x=" + format_point(x) +
                                    ", p=" + format_point(p) + " (residual " +
                                    std::to_string(res) + ")",
                                res);
    }
  }

  ConjugateResult out;
  out.xi = xi;
  out.H = p.dot(xi) - e.value;
  out.dH_dp = xi;
  out.dH_dx = -e.dx;
  out.newton_iters = iters;
  out.residual = res;
  return out;
}

double roundtrip_residual(const LagrangianModel& model, const Vec& x, double t, const Vec& xi,
                          const ConjugateOptions& opts) {
  const Vec p = model.eval(x, t, xi).dxi;
  return (conjugate_velocity(model, x, t, p, std::nullopt, opts).xi - xi).norm();
}

}  // namespace varmin
