#include "varmin/discrete.hpp"

#include "varmin/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace varmin {

namespace {

bool bit_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

Grid::Grid(double horizon, int K) : t_(horizon), K_(K), h_(horizon / K) {
  if (K < 2) throw ContractError("grid: K must be >= 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ContractError("grid: horizon must be positive");
}

DiscretePath::DiscretePath(Grid grid, int dim, bool two_point, std::vector<Vec> nodes)
    : grid_(grid), dim_(dim), two_point_(two_point), nodes_(std::move(nodes)) {}

DiscretePath DiscretePath::from_nodes(const Problem& problem, std::vector<Vec> nodes) {
  const int K = static_cast<int>(nodes.size()) - 1;
  DiscretePath path(Grid(problem.horizon(), K), problem.dim(), problem.is_two_point(),
                    std::move(nodes));
  check_path(problem, path);
  return path;
}

DiscretePath DiscretePath::from_free(const Problem& problem, int K, const Vec& free) {
  const Grid grid(problem.horizon(), K);
  const int d = problem.dim();
  const int first = problem.is_two_point() ? 1 : 0;
  if (free.size() != static_cast<Eigen::Index>(d) * (K - first)) {
    throw ContractError("path: free vector has wrong length");
  }
  std::vector<Vec> nodes(K + 1);
  if (first == 1) nodes[0] = problem.start();
  for (int k = first; k < K; ++k) nodes[k] = free.segment(static_cast<Eigen::Index>(k - first) * d, d);
  nodes[K] = problem.end();
  return DiscretePath(grid, d, problem.is_two_point(), std::move(nodes));
}

Vec DiscretePath::slope(int k) const {
  if (k < 0 || k >= K()) throw ContractError("path: slope index out of range");
  return (nodes_[k + 1] - nodes_[k]) / grid_.h();
}

Vec DiscretePath::free_vector() const {
  const int first = first_free();
  Vec v(static_cast<Eigen::Index>(dim_) * (K() - first));
  for (int k = first; k < K(); ++k) v.segment(static_cast<Eigen::Index>(k - first) * dim_, dim_) = nodes_[k];
  return v;
}

void check_path(const Problem& problem, const DiscretePath& path) {
  if (path.K() < 2) throw ContractError("path: K must be >= 2");
  if (path.grid().horizon() != problem.horizon()) throw ContractError("path: horizon mismatch");
  if (path.two_point() != problem.is_two_point()) throw ContractError("path: problem kind mismatch");
  if (path.dim() != problem.dim()) throw ContractError("path: dimension mismatch");
  for (const Vec& y : path.nodes()) {
    if (y.size() != problem.dim()) throw ContractError("path: node dimension mismatch");
    if (!y.allFinite()) throw ContractError("path: non-finite node");
  }
  if (!bit_equal(path.nodes().back(), problem.end())) {
    throw ContractError("path: terminal node differs from the problem endpoint");
  }
  if (problem.is_two_point() && !bit_equal(path.nodes().front(), problem.start())) {
    throw ContractError("path: initial node differs from the fixed start point");
  }
}

double discrete_action(const Problem& problem, const DiscretePath& path) {
  check_path(problem, path);
  const LagrangianModel& model = problem.model();
  const Grid& g = path.grid();
  double sum = 0.0;
  for (int k = 0; k < path.K(); ++k) sum += model.eval(path.node(k), g.node(k), path.slope(k)).value;
  double action = sum * g.h();
  if (problem.is_bolza()) action += problem.terminal_cost().value(path.node(0));
  return action;
}

Vec discrete_gradient(const Problem& problem, const DiscretePath& path) {
  check_path(problem, path);
  const LagrangianModel& model = problem.model();
  const Grid& g = path.grid();
  const int d = path.dim();
  const int first = path.first_free();

  std::vector<LagrangianEval> evals;
  evals.reserve(path.K());
  for (int k = 0; k < path.K(); ++k) evals.push_back(model.eval(path.node(k), g.node(k), path.slope(k)));

  Vec grad(static_cast<Eigen::Index>(d) * (path.K() - first));
  for (int k = first; k < path.K(); ++k) {
    Vec gk = evals[k].dx * g.h() - evals[k].dxi;
    if (k > 0) {
      gk += evals[k - 1].dxi;
    } else {
      gk += problem.terminal_cost().gradient(path.node(0));
    }
    grad.segment(static_cast<Eigen::Index>(k - first) * d, d) = gk;
  }
  return grad;
}

BlockTridiagonal discrete_hessian(const Problem& problem, const DiscretePath& path) {
  check_path(problem, path);
  const LagrangianModel& model = problem.model();
  const Grid& g = path.grid();
  const double h = g.h();
  const int d = path.dim();
  const int first = path.first_free();
  const int n = path.K() - first;

  BlockTridiagonal a;
  a.diag.assign(n, Mat::Zero(d, d));
  a.upper.assign(n > 0 ? n - 1 : 0, Mat::Zero(d, d));

  // Term k is L(y_k, t_k, (y_{k+1} - y_k)/h) h and couples nodes k and k+1.
  for (int k = 0; k < path.K(); ++k) {
    const SecondDerivatives s = model.second_derivatives(path.node(k), g.node(k), path.slope(k));
    const Mat aa = h * s.xx - s.xxi - s.xxi.transpose() + s.xixi / h;
    const Mat ab = s.xxi - s.xixi / h;
    const Mat bb = s.xixi / h;
    const bool k_free = k >= first;
    const bool next_free = k + 1 < path.K();
    if (k_free) a.diag[k - first] += aa;
    if (next_free) a.diag[k + 1 - first] += bb;
    if (k_free && next_free) a.upper[k - first] += ab;
  }
  if (problem.is_bolza()) a.diag[0] += problem.terminal_cost().hessian(path.node(0));
  for (Mat& m : a.diag) m = (0.5 * (m + m.transpose())).eval();
  return a;
}

MomentumPath discrete_momenta(const LagrangianModel& model, const DiscretePath& path) {
  MomentumPath m;
  m.z.reserve(path.K());
  for (int k = 0; k < path.K(); ++k) {
    m.z.push_back(model.eval(path.node(k), path.grid().node(k), path.slope(k)).dxi);
  }
  return m;
}

double discrete_hamilton_residual(const LagrangianModel& model, const DiscretePath& path,
                                  const MomentumPath& momenta) {
  if (static_cast<int>(momenta.z.size()) != path.K()) {
    throw ContractError("hamilton residual: momenta length does not match the path");
  }
  const Grid& g = path.grid();
  double worst = 0.0;
  for (int k = 0; k < path.K(); ++k) {
    const Vec slope = path.slope(k);
    const ConjugateResult c = conjugate_velocity(model, path.node(k), g.node(k), momenta.z[k], slope);
    worst = std::max(worst, (slope - c.dH_dp).cwiseAbs().maxCoeff());
    if (k > 0) {
      const Vec dz = (momenta.z[k] - momenta.z[k - 1]) / g.h();
      worst = std::max(worst, (dz + c.dH_dx).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

DiscretePath comparison_path(const Problem& problem, int K) {
  const Grid g(problem.horizon(), K);
  std::vector<Vec> nodes(K + 1);
  if (problem.is_bolza()) {
    std::fill(nodes.begin(), nodes.end(), problem.end());
  } else {
    const Vec& a = problem.start();
    const Vec& b = problem.end();
    for (int k = 0; k <= K; ++k) nodes[k] = a + (b - a) * (g.node(k) / g.horizon());
    nodes.front() = a;
    nodes.back() = b;
  }
  return DiscretePath::from_nodes(problem, std::move(nodes));
}

BoundsCertificate bounds_certificate(const Problem& problem, const DiscretePath& path,
                                     std::optional<double> C_x_override) {
  check_path(problem, path);
  const LagrangianModel& model = problem.model();
  const double t = problem.horizon();
  const Vec& x = problem.end();
  const double alpha = problem.is_bolza() ? problem.terminal_cost().alpha() : 0.0;
  const double beta = problem.is_bolza() ? problem.terminal_cost().beta() : 0.0;

  BoundsCertificate c;
  c.comparison = problem.is_bolza() ? "constant" : "straight_line";
  c.cx_overridden = C_x_override.has_value();
  c.C_x = C_x_override ? *C_x_override : discrete_action(problem, comparison_path(problem, path.K()));

  double b = 0.0;
  if (auto exact = model.superlinearity(1.0 + alpha)) {
    b = *exact;
  } else {
    // Estimate over a box enclosing the path and its slopes.
    double r = 1.0;
    for (int k = 0; k < path.K(); ++k) {
      r = std::max({r, path.node(k).cwiseAbs().maxCoeff() + 1.0,
                    path.slope(k).cwiseAbs().maxCoeff() + 1.0});
    }
    SampleBox box = SampleBox::cube(model.dim(), -r, r);
    box.t = {0.0, t};
    b = estimate_superlinearity(model, box, 1000, 1.0 + alpha);
    c.approximate = true;
  }

  c.R1 = c.C_x + (1.0 + alpha) * x.norm() - b * t - beta;
  c.R2 = (c.C_x + alpha * x.norm() - b * t - beta) / t;

  c.min_slope = path.slope(0).norm();
  c.k_star = 0;
  for (int k = 1; k < path.K(); ++k) {
    const double s = path.slope(k).norm();
    if (s < c.min_slope) {
      c.min_slope = s;
      c.k_star = k;
    }
  }
  for (int l = 0; l < path.K(); ++l) c.max_node_norm = std::max(c.max_node_norm, path.node(l).norm());
  c.momentum_at_k_star =
      model.eval(path.node(c.k_star), path.grid().node(c.k_star), path.slope(c.k_star)).dxi.norm();
  c.action = discrete_action(problem, path);
  c.holds = c.action <= c.C_x;
  return c;
}

}  // namespace varmin
