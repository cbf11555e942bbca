#include "varmin/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace varmin {

EndpointSpec endpoints_for(const Problem& problem) {
  EndpointSpec e;
  if (problem.is_two_point()) e.left = problem.start();
  e.right = problem.end();
  return e;
}

namespace {

// Standard bump exp(-1 / (1 - u^2)) on |u| < 1.
double bump(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

double bump_derivative(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return bump(u) * (-2.0 * u) / (q * q);
}

}  // namespace

SampledCurve mollify_curve(const SampledCurve& curve, double eps, const EndpointSpec& endpoints,
                           Extension extension) {
  curve.validate();
  if (curve.size() < 3) throw ContractError("mollify: need at least three samples");
  if (!curve.uniform()) throw ContractError("mollify: samples must be uniform");
  const double t0 = curve.s.front();
  const double t = curve.s.back() - t0;
  if (!(eps > 0.0) || !(eps < t / 4.0)) throw ContractError("mollify: eps must lie in (0, t/4)");
  const int d = curve.dim();
  if (endpoints.right.size() != d || (endpoints.left && endpoints.left->size() != d)) {
    throw ContractError("mollify: endpoint dimension mismatch");
  }

  const int n = static_cast<int>(curve.size()) - 1;
  const double ds = t / n;
  const Vec left = endpoints.left.value_or(curve.y.front());
  const Vec& right = endpoints.right;

  // Kernel support |m ds| < eps.
  const int half = std::max(0, static_cast<int>(std::ceil(eps / ds)) - 1);
  std::vector<double> w(2 * half + 1);
  std::vector<double> dw(2 * half + 1);
  double wsum = 0.0;
  double moment = 0.0;
  for (int m = -half; m <= half; ++m) {
    w[m + half] = bump(m * ds / eps);
    dw[m + half] = bump_derivative(m * ds / eps);
    wsum += w[m + half];
    moment += m * dw[m + half];
  }
  for (double& v : w) v /= wsum;
  // Scale so the derivative kernel differentiates affine functions exactly.
  const double dscale = moment != 0.0 ? -1.0 / (ds * moment) : 0.0;
  for (double& v : dw) v *= dscale;

  auto extended = [&](int j) -> Vec {
    if (j >= 0 && j <= n) return curve.y[j];
    if (extension == Extension::constant) return j < 0 ? left : right;
    if (j < 0) return 2.0 * left - curve.y[std::min(-j, n)];
    return 2.0 * right - curve.y[std::max(2 * n - j, 0)];
  };

  SampledCurve out;
  out.s = curve.s;
  out.y.resize(n + 1);
  out.dy.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    Vec acc = Vec::Zero(d);
    Vec dacc = Vec::Zero(d);
    for (int m = -half; m <= half; ++m) {
      const Vec v = extended(i - m);
      acc += w[m + half] * v;
      dacc += dw[m + half] * v;
    }
    out.y[i] = acc;
    out.dy[i] = half > 0 ? dacc : Vec((i < n ? extended(i + 1) - curve.y[i] : curve.y[i] - curve.y[i - 1]) / ds);
  }

  const Vec right_fix = right - out.y[n];
  const Vec left_fix = left - out.y[0];
  for (int i = 0; i <= n; ++i) {
    const double s = curve.s[i] - t0;
    out.y[i] += right_fix * (s / t) + left_fix * ((t - s) / t);
    out.dy[i] += (right_fix - left_fix) / t;
  }
  out.y.front() = left;
  out.y.back() = right;
  return out;
}

MollificationStudy mollification_study(const Problem& problem, const SampledCurve& curve,
                                       const std::vector<double>& eps_list, double minimizer_action,
                                       Extension extension) {
  curve.validate();
  if (eps_list.empty()) throw ContractError("mollification_study: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw ContractError("mollification_study: eps list must be strictly decreasing");
    }
  }
  const SampledCurve raw = curve.has_derivatives() ? curve : with_polyline_derivatives(curve);
  const EndpointSpec ends = endpoints_for(problem);

  MollificationStudy study;
  study.minimizer_action = minimizer_action;
  study.raw_action = continuous_action(problem, raw).value;
  study.all_dominated = true;
  study.differences_decreasing = true;
  for (double eps : eps_list) {
    const SampledCurve smooth = mollify_curve(curve, eps, ends, extension);
    MollificationRow row;
    row.eps = eps;
    row.action = continuous_action(problem, smooth).value;
    row.difference = row.action - study.raw_action;
    row.dominated = minimizer_action <= row.action + 1e-10;
    const Vec left = ends.left.value_or(curve.y.front());
    row.endpoint_error = std::max((smooth.y.front() - left).cwiseAbs().maxCoeff(),
                                  (smooth.y.back() - ends.right).cwiseAbs().maxCoeff());
    for (const Vec& v : smooth.dy) row.max_slope = std::max(row.max_slope, v.cwiseAbs().maxCoeff());
    row.first_variation = first_variation_oscillation(problem.model(), smooth);
    if (!study.rows.empty() &&
        std::abs(row.difference) > std::abs(study.rows.back().difference) + 1e-10) {
      study.differences_decreasing = false;
    }
    study.all_dominated = study.all_dominated && row.dominated;
    study.rows.push_back(row);
  }
  return study;
}

}  // namespace varmin
