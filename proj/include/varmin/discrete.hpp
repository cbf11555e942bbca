#pragma once

#include "varmin/block_tridiagonal.hpp"
#include "varmin/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varmin {

/// Uniform grid t_k = h k on [0, t], h = t / K.
class Grid {
 public:
  Grid(double horizon, int K);

  double horizon() const noexcept { return t_; }
  int K() const noexcept { return K_; }
  double h() const noexcept { return h_; }
  /// t_k; t_K is the horizon itself.
  double node(int k) const noexcept { return k == K_ ? t_ : h_ * k; }

 private:
  double t_;
  int K_;
  double h_;
};

/// Nodes y_0 .. y_K of a discrete curve. y_K (and y_0 for two-point problems)
/// are copies of the problem's endpoints; the remaining nodes are free.
class DiscretePath {
 public:
  /// All K + 1 nodes. Throws ContractError when the fixed nodes do not match
  /// the problem bit for bit.
  static DiscretePath from_nodes(const Problem& problem, std::vector<Vec> nodes);
  /// Free nodes stacked into one vector (layout of free_vector()).
  static DiscretePath from_free(const Problem& problem, int K, const Vec& free);

  const Grid& grid() const noexcept { return grid_; }
  int K() const noexcept { return grid_.K(); }
  int dim() const noexcept { return dim_; }
  bool two_point() const noexcept { return two_point_; }

  const Vec& node(int k) const { return nodes_.at(k); }
  const std::vector<Vec>& nodes() const noexcept { return nodes_; }
  /// y'_k = (y_{k+1} - y_k) / h, k = 0 .. K-1.
  Vec slope(int k) const;

  /// Index of the first free node (0 for Bolza, 1 for two-point).
  int first_free() const noexcept { return two_point_ ? 1 : 0; }
  int free_nodes() const noexcept { return K() - first_free(); }
  Vec free_vector() const;

 private:
  DiscretePath(Grid grid, int dim, bool two_point, std::vector<Vec> nodes);

  Grid grid_;
  int dim_;
  bool two_point_;
  std::vector<Vec> nodes_;
};

/// z_k = dL/dxi(y_k, t_k, y'_k), k = 0 .. K-1.
struct MomentumPath {
  std::vector<Vec> z;
};

/// A-priori bounds for minimizers of the discrete action.
struct BoundsCertificate {
  double C_x = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  int k_star = 0;
  double min_slope = 0.0;         // |y'_{k_star}|
  double max_node_norm = 0.0;     // max_l |y_l|, l < K
  double momentum_at_k_star = 0.0;  // |z_{k_star}|
  double action = 0.0;
  bool holds = false;
  /// b_a was not exact for the model.
  bool approximate = false;
  /// C_x was evaluated at the path's own K rather than as a supremum over K.
  bool cx_at_given_K = true;
  bool cx_overridden = false;
  std::string comparison;  // "constant" or "straight_line"
};

/// Throws ContractError when `path` does not belong to `problem`.
void check_path(const Problem& problem, const DiscretePath& path);

/// sum_k L(y_k, t_k, y'_k) h, plus w(y_0) for Bolza problems.
double discrete_action(const Problem& problem, const DiscretePath& path);

/// Gradient of discrete_action with respect to the free nodes.
Vec discrete_gradient(const Problem& problem, const DiscretePath& path);

/// Hessian of discrete_action with respect to the free nodes; one block per
/// free node.
BlockTridiagonal discrete_hessian(const Problem& problem, const DiscretePath& path);

MomentumPath discrete_momenta(const LagrangianModel& model, const DiscretePath& path);

/// Max-norm residual of the Euler discretization of Hamilton's equations:
/// |y'_k - dH/dp(y_k, t_k, z_k)| for k < K and |z'_k + dH/dx(y_k, t_k, z_k)|
/// for 0 < k < K.
double discrete_hamilton_residual(const LagrangianModel& model, const DiscretePath& path,
                                  const MomentumPath& momenta);

/// Comparison path for C_x: constant x (Bolza) or the straight segment from
/// the start to the end (two-point).
DiscretePath comparison_path(const Problem& problem, int K);

BoundsCertificate bounds_certificate(const Problem& problem, const DiscretePath& path,
                                     std::optional<double> C_x_override = std::nullopt);

}  // namespace varmin
