#include "varmin/analysis.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <random>

namespace varmin {

SampledCurve zigzag_curve(const Vec& start, const Vec& end, double t, int teeth, double amplitude,
                          int intervals) {
  if (teeth < 1 || intervals < 2 * teeth || intervals % (2 * teeth) != 0) {
    throw ContractError("zigzag: intervals must be a positive multiple of 2 teeth");
  }
  if (!(t > 0.0) || start.size() != end.size()) throw ContractError("zigzag: bad horizon or endpoints");
  const Vec v = (end - start) / t;
  const Vec up = v.array() + amplitude;
  const Vec down = v.array() - amplitude;
  const int per_half = intervals / (2 * teeth);
  const double ds = t / intervals;

  SampledCurve c;
  for (int i = 0; i <= intervals; ++i) {
    const int tooth = i / (2 * per_half);
    const int within = i % (2 * per_half);
    Vec y = start + v * (tooth * 2 * per_half * ds);
    if (within <= per_half) {
      y += up * (within * ds);
    } else {
      y += up * (per_half * ds) + down * ((within - per_half) * ds);
    }
    // Derivative: slope of the segment to the right of the sample.
    const bool rising = within < per_half && i < intervals;
    c.s.push_back(i == intervals ? t : ds * i);
    c.y.push_back(i == intervals ? end : y);
    c.dy.push_back(rising ? up : down);
  }
  return c;
}

std::vector<SampledCurve> comparison_family(const Problem& problem, int count, int waypoints,
                                            double amplitude, int samples, std::uint64_t seed) {
  if (count < 1 || waypoints < 1 || samples < 3) throw ContractError("comparison_family: bad sizes");
  const double t = problem.horizon();
  const int d = problem.dim();
  const Vec end = problem.end();
  const Vec start = problem.is_two_point() ? problem.start() : end;
  const int knots = waypoints + 2;
  const double knot_step = t / (knots - 1);
  const double ds = t / (samples - 1);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  std::vector<SampledCurve> family;
  for (int c = 0; c < count; ++c) {
    std::vector<std::vector<double>> values(d, std::vector<double>(knots));
    for (int i = 0; i < knots; ++i) {
      const double s = i * knot_step;
      const Vec base = start + (end - start) * (s / t);
      for (int j = 0; j < d; ++j) {
        const bool fixed = i == knots - 1 || (i == 0 && problem.is_two_point());
        values[j][i] = fixed ? (i == 0 ? start[j] : end[j]) : base[j] + noise(rng);
      }
    }
    SampledCurve curve;
    std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> splines;
    for (int j = 0; j < d; ++j) splines.emplace_back(values[j].data(), values[j].size(), 0.0, knot_step);
    for (int i = 0; i < samples; ++i) {
      const double s = i + 1 == samples ? t : i * ds;
      Vec y(d);
      Vec dy(d);
      for (int j = 0; j < d; ++j) {
        y[j] = splines[j](s);
        dy[j] = splines[j].prime(s);
      }
      curve.s.push_back(s);
      curve.y.push_back(y);
      curve.dy.push_back(dy);
    }
    // Pin the fixed endpoints exactly.
    for (int j = 0; j < d; ++j) {
      curve.y.back()[j] = values[j].back();
      curve.y.front()[j] = values[j].front();
    }
    family.push_back(std::move(curve));
  }
  return family;
}

}  // namespace varmin
