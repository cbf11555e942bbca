#include "varmin/verify.hpp"

#include "varmin/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace varmin {

bool LegendreSweep::pass(double tol) const {
  return samples > 0 && solve_failures == 0 && max_roundtrip <= tol && max_equality_gap <= tol &&
         min_gap >= -tol && false_equalities == 0 && max_dHdx_error <= 1e-6;
}

LegendreSweep legendre_sweep(const LagrangianModel& model, const SampleBox& box, int n_samples,
                             std::uint64_t seed, double tol) {
  if (n_samples < 1) throw ContractError("legendre_sweep: n_samples must be >= 1");
  LegendreSweep sweep;
  sweep.samples = n_samples;
  sweep.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const SamplePoint s = draw_sample(box, seed, i);
    // A second draw supplies the off-diagonal momentum q.
    const SamplePoint other = draw_sample(box, seed ^ 0x9e3779b97f4a7c15ULL, i);
    try {
      sweep.max_roundtrip = std::max(sweep.max_roundtrip, roundtrip_residual(model, s.x, s.t, s.xi));

      const LagrangianEval L = model.eval(s.x, s.t, s.xi);
      const ConjugateResult at_p = conjugate_velocity(model, s.x, s.t, L.dxi);
      const double eq_gap = at_p.H + L.value - L.dxi.dot(s.xi);
      sweep.max_equality_gap = std::max(sweep.max_equality_gap, std::abs(eq_gap));

      const Vec q = model.eval(s.x, s.t, other.xi).dxi;
      const ConjugateResult at_q = conjugate_velocity(model, s.x, s.t, q);
      const double gap = at_q.H + L.value - q.dot(s.xi);
      sweep.min_gap = std::min(sweep.min_gap, gap);
      if ((q - L.dxi).norm() > 1e-4 && gap <= tol) ++sweep.false_equalities;

      for (Eigen::Index j = 0; j < s.x.size(); ++j) {
        const double step = 1e-6 * (1.0 + std::abs(s.x[j]));
        Vec xp = s.x;
        Vec xm = s.x;
        xp[j] += step;
        xm[j] -= step;
        const double Hp = conjugate_velocity(model, xp, s.t, L.dxi, at_p.xi).H;
        const double Hm = conjugate_velocity(model, xm, s.t, L.dxi, at_p.xi).H;
        const double fd = (Hp - Hm) / (2.0 * step);
        sweep.max_dHdx_error = std::max(sweep.max_dHdx_error, std::abs(fd - at_p.dH_dx[j]));
      }
    } catch (const ConjugateSolveError&) {
      ++sweep.solve_failures;
    } catch (const ConditionViolationError&) {
      ++sweep.solve_failures;
    }
  }
  return sweep;
}

Vec fd_discrete_gradient(const Problem& problem, const DiscretePath& path, double step) {
  const Vec y = path.free_vector();
  Vec g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vec yp = y;
    Vec ym = y;
    yp[i] += step;
    ym[i] -= step;
    const double fp = discrete_action(problem, DiscretePath::from_free(problem, path.K(), yp));
    const double fm = discrete_action(problem, DiscretePath::from_free(problem, path.K(), ym));
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

DiscretePath random_path(const Problem& problem, int K, std::uint64_t seed, int index,
                         double spread) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(K), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-spread, spread);
  const DiscretePath base = initial_guess(problem, K, InitStrategy::straight_line);
  Vec free = base.free_vector();
  for (Eigen::Index i = 0; i < free.size(); ++i) free[i] = unit(rng);
  return DiscretePath::from_free(problem, K, free);
}

GradientSweep gradient_sweep(const Problem& problem, const std::vector<int>& Ks, int paths_per_K,
                             std::uint64_t seed, double spread) {
  GradientSweep sweep;
  for (int K : Ks) {
    for (int i = 0; i < paths_per_K; ++i) {
      const DiscretePath path = random_path(problem, K, seed, i, spread);
      const Vec g = discrete_gradient(problem, path);
      const Vec fd = fd_discrete_gradient(problem, path);
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      sweep.max_relative_error =
          std::max(sweep.max_relative_error, (g - fd).cwiseAbs().maxCoeff() / scale);
      ++sweep.paths;
    }
  }
  return sweep;
}

}  // namespace varmin
