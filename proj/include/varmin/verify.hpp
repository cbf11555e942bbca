#pragma once

#include "varmin/solve.hpp"

#include <cstdint>
#include <vector>

namespace varmin {

/// Legendre roundtrip and Fenchel-Young sweep over random (x, t, xi).
struct LegendreSweep {
  int samples = 0;
  double max_roundtrip = 0.0;
  /// max |H(p) + L(xi) - p.xi| with p = dL/dxi(xi).
  double max_equality_gap = 0.0;
  /// min of H(q) + L(xi) - q.xi over random q (must be >= -tol).
  double min_gap = 0.0;
  /// Pairs with q != dL/dxi(xi) whose gap fell at or below the equality tolerance.
  int false_equalities = 0;
  /// max |dH/dx - central difference of H in x|.
  double max_dHdx_error = 0.0;
  int solve_failures = 0;
  bool pass(double tol = 1e-10) const;
};

LegendreSweep legendre_sweep(const LagrangianModel& model, const SampleBox& box, int n_samples,
                             std::uint64_t seed = 0x5eed, double tol = 1e-10);

struct GradientSweep {
  int paths = 0;
  /// max over paths of |g - g_fd|_inf / max(1, |g|_inf).
  double max_relative_error = 0.0;
  bool pass(double tol = 1e-6) const { return paths > 0 && max_relative_error <= tol; }
};

/// Central differences of discrete_action with step `step`, one free
/// coordinate at a time.
Vec fd_discrete_gradient(const Problem& problem, const DiscretePath& path, double step = 1e-6);

/// Random paths (nodes uniform in [-spread, spread]) for `problem` at each K.
GradientSweep gradient_sweep(const Problem& problem, const std::vector<int>& Ks, int paths_per_K,
                             std::uint64_t seed = 0x5eed, double spread = 2.0);

/// Random path consistent with `problem`; the fixed endpoints are exact.
DiscretePath random_path(const Problem& problem, int K, std::uint64_t seed, int index,
                         double spread = 2.0);

}  // namespace varmin
