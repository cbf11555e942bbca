#include "varmin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varmin {

namespace {

// Composite Simpson over f[0], f[stride], f[2 stride], ...; a trailing odd
// interval falls back to the trapezoid rule.
QuadratureResult composite(const std::vector<double>& f, double step, std::size_t stride) {
  QuadratureResult q;
  const std::size_t n = (f.size() - 1) / stride;  // intervals
  const double h = step * static_cast<double>(stride);
  const std::size_t simpson = n - n % 2;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson; i += 2) {
    sum += f[i * stride] + 4.0 * f[(i + 1) * stride] + f[(i + 2) * stride];
  }
  q.value = sum * h / 3.0;
  if (n % 2 == 1) {
    q.value += 0.5 * h * (f[(n - 1) * stride] + f[n * stride]);
    q.trapezoid_tail = true;
  }
  return q;
}

}  // namespace

QuadratureResult continuous_action(const Problem& problem, const SampledCurve& curve) {
  curve.validate();
  if (!curve.has_derivatives()) throw ContractError("continuous_action: curve needs derivatives");
  if (curve.size() < 2) throw ContractError("continuous_action: need at least two samples");
  if (!curve.uniform()) throw ContractError("continuous_action: samples must be uniform");
  if (curve.dim() != problem.dim()) throw ContractError("continuous_action: dimension mismatch");

  const LagrangianModel& model = problem.model();
  std::vector<double> f(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) f[i] = model.eval(curve.y[i], curve.s[i], curve.dy[i]).value;

  const double step = (curve.s.back() - curve.s.front()) / static_cast<double>(curve.size() - 1);
  QuadratureResult q = composite(f, step, 1);
  // Half-sampling comparison uses the samples that land on the coarse grid.
  const std::size_t n = curve.size() - 1;
  if (n >= 2 && n % 2 == 0) {
    q.error_estimate = std::abs(q.value - composite(f, step, 2).value);
  } else if (n >= 3) {
    std::vector<double> head(f.begin(), f.end() - 1);
    const QuadratureResult fine = composite(head, step, 1);
    const QuadratureResult coarse = composite(head, step, 2);
    q.error_estimate = std::abs(fine.value - coarse.value);
  }
  if (problem.is_bolza()) q.value += problem.terminal_cost().value(curve.y.front());
  return q;
}

double el_residual(const LagrangianModel& model, const SampledCurve& curve) {
  curve.validate();
  if (!curve.has_derivatives()) throw ContractError("el_residual: curve needs derivatives");
  if (curve.size() < 3) throw ContractError("el_residual: need at least three samples");
  std::vector<LagrangianEval> e;
  e.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) e.push_back(model.eval(curve.y[i], curve.s[i], curve.dy[i]));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const Vec dp = (e[i + 1].dxi - e[i - 1].dxi) / (curve.s[i + 1] - curve.s[i - 1]);
    worst = std::max(worst, (dp - e[i].dx).cwiseAbs().maxCoeff());
  }
  return worst;
}

double first_variation_oscillation(const LagrangianModel& model, const SampledCurve& curve) {
  curve.validate();
  if (!curve.has_derivatives()) throw ContractError("first_variation: curve needs derivatives");
  const int d = curve.dim();
  Vec integral = Vec::Zero(d);
  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(d, -std::numeric_limits<double>::infinity());
  Vec prev_dx;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const LagrangianEval e = model.eval(curve.y[i], curve.s[i], curve.dy[i]);
    if (i > 0) integral += 0.5 * (curve.s[i] - curve.s[i - 1]) * (prev_dx + e.dx);
    const Vec q = e.dxi - integral;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
    prev_dx = e.dx;
  }
  return (hi - lo).maxCoeff();
}

}  // namespace varmin
