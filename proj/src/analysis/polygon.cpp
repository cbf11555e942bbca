#include "varmin/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace varmin {

bool SampledCurve::uniform() const {
  if (s.size() < 2) return true;
  const double step = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s[i] - s[i - 1]) - step) > 1e-9 * std::abs(step)) return false;
  }
  return true;
}

void SampledCurve::validate() const {
  if (s.size() != y.size()) throw ContractError("curve: time and position counts differ");
  if (!dy.empty() && dy.size() != y.size()) throw ContractError("curve: derivative count differs");
  if (s.empty()) throw ContractError("curve: no samples");
  const auto d = y.front().size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || (i > 0 && !(s[i] > s[i - 1]))) {
      throw ContractError("curve: sample times must be finite and strictly increasing");
    }
    if (y[i].size() != d || (!dy.empty() && dy[i].size() != d)) {
      throw ContractError("curve: inconsistent sample dimension");
    }
  }
}

SampledCurve with_polyline_derivatives(SampledCurve curve) {
  curve.validate();
  if (curve.size() < 2) throw ContractError("curve: need two samples for polyline slopes");
  curve.dy.resize(curve.size());
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    curve.dy[i] = (curve.y[i + 1] - curve.y[i]) / (curve.s[i + 1] - curve.s[i]);
  }
  curve.dy.back() = curve.dy[curve.size() - 2];
  return curve;
}

PhasePolygon::PhasePolygon(Grid grid, std::vector<Vec> y, std::vector<Vec> z)
    : grid_(grid), y_(std::move(y)), z_(std::move(z)) {
  const auto K = static_cast<std::size_t>(grid_.K());
  if (y_.size() != K + 1) throw ContractError("polygon: need K + 1 position nodes");
  if (z_.size() == K) {
    z_.push_back(z_.back());
  } else if (z_.size() != K + 1) {
    throw ContractError("polygon: need K momentum nodes");
  }
}

PhaseState PhasePolygon::evaluate(double s) const {
  const int K = grid_.K();
  const double h = grid_.h();
  int k = static_cast<int>(std::floor(s / h));
  k = std::clamp(k, 0, K - 1);
  if (s == grid_.node(k)) return {y_[k], z_[k]};
  if (s == grid_.node(k + 1)) return {y_[k + 1], z_[k + 1]};
  const double lambda = (s - grid_.node(k)) / h;
  return {y_[k] + lambda * (y_[k + 1] - y_[k]), z_[k] + lambda * (z_[k + 1] - z_[k])};
}

double PhasePolygon::lipschitz_constant() const {
  double lip = 0.0;
  for (int k = 0; k < grid_.K(); ++k) {
    lip = std::max({lip, (y_[k + 1] - y_[k]).norm() / grid_.h(), (z_[k + 1] - z_[k]).norm() / grid_.h()});
  }
  return lip;
}

SampledCurve PhasePolygon::node_curve() const {
  SampledCurve c;
  for (int k = 0; k < grid_.K(); ++k) {
    c.s.push_back(grid_.node(k));
    c.y.push_back(y_[k]);
    c.dy.push_back((y_[k + 1] - y_[k]) / grid_.h());
  }
  return c;
}

PhasePolygon polygonal_interpolant(const DiscretePath& path, const MomentumPath& momenta) {
  if (static_cast<int>(momenta.z.size()) != path.K()) {
    throw ContractError("polygon: momenta length does not match the path");
  }
  return PhasePolygon(path.grid(), path.nodes(), momenta.z);
}

namespace {

double phase_gap(const PhaseState& a, const PhaseState& b) {
  return std::max((a.y - b.y).cwiseAbs().maxCoeff(), (a.z - b.z).cwiseAbs().maxCoeff());
}

}  // namespace

double polygon_distance(const PhasePolygon& a, const PhasePolygon& b, int n_probe) {
  const double t = a.grid().horizon();
  if (t != b.grid().horizon()) throw ContractError("polygon_distance: horizon mismatch");
  if (n_probe < 0) throw ContractError("polygon_distance: n_probe must be >= 0");
  double worst = 0.0;
  auto probe = [&](double s) { worst = std::max(worst, phase_gap(a.evaluate(s), b.evaluate(s))); };
  for (int i = 0; i < n_probe; ++i) probe(n_probe == 1 ? 0.0 : t * i / (n_probe - 1));
  for (int k = 0; k <= a.grid().K(); ++k) probe(a.grid().node(k));
  for (int k = 0; k <= b.grid().K(); ++k) probe(b.grid().node(k));
  return worst;
}

double polygon_flow_distance(const PhasePolygon& poly, const SampledCurve& position,
                             const SampledCurve& momentum) {
  if (position.size() != momentum.size()) throw ContractError("flow distance: sample count mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < position.size(); ++i) {
    worst = std::max(worst, phase_gap(poly.evaluate(position.s[i]), {position.y[i], momentum.y[i]}));
  }
  return worst;
}

double polygon_action(const Problem& problem, const PhasePolygon& poly) {
  const LagrangianModel& model = problem.model();
  const Grid& g = poly.grid();
  const auto& y = poly.positions();
  double sum = 0.0;
  for (int k = 0; k < g.K(); ++k) {
    const Vec slope = (y[k + 1] - y[k]) / g.h();
    const double a = model.eval(y[k], g.node(k), slope).value;
    const double m = model.eval(0.5 * (y[k] + y[k + 1]), g.node(k) + 0.5 * g.h(), slope).value;
    const double b = model.eval(y[k + 1], g.node(k + 1), slope).value;
    sum += (a + 4.0 * m + b) / 6.0;
  }
  double action = sum * g.h();
  if (problem.is_bolza()) action += problem.terminal_cost().value(y.front());
  return action;
}

}  // namespace varmin
