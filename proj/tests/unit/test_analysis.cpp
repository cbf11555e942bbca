#include "helpers.hpp"

#include <limits>
#include <numbers>

using namespace varmin;
using testing::catalog;
using testing::max_abs;
using testing::vec;

namespace {

// Uniform samples of a closed-form curve on [0, t].
template <class F, class DF>
SampledCurve sample(F f, DF df, double t, int intervals) {
  SampledCurve c;
  for (int i = 0; i <= intervals; ++i) {
    const double s = i == intervals ? t : t * i / intervals;
    c.s.push_back(s);
    c.y.push_back(vec({f(s)}));
    c.dy.push_back(vec({df(s)}));
  }
  return c;
}

Problem ho_two_point() {
  return Problem::two_point(catalog("harmonic_oscillator"), 1.0, vec({0.0}), vec({1.0}));
}

Problem fp_two_point() {
  return Problem::two_point(catalog("free_particle"), 1.0, vec({0.0}), vec({1.0}));
}

const double kHalfCot1 = 0.5 / std::tan(1.0);

}  // namespace

TEST_CASE("polygon interpolation examples") {
  const PhasePolygon poly(Grid(1.0, 2), {vec({0.0}), vec({0.5}), vec({1.0})}, {vec({1.0}), vec({1.0})});
  const PhaseState mid = poly.evaluate(0.25);
  CHECK(mid.y[0] == 0.25);
  CHECK(mid.z[0] == 1.0);
  const PhaseState end = poly.evaluate(1.0);
  CHECK(end.y[0] == 1.0);
  CHECK(end.z[0] == 1.0);
  CHECK_THROWS_AS(PhasePolygon(Grid(1.0, 2), {vec({0.0}), vec({1.0})}, {vec({1.0}), vec({1.0})}),
                  ContractError);

  const SolveResult r = minimize_discrete(ho_two_point(), 37, initial_guess(ho_two_point(), 37, InitStrategy::straight_line));
  const PhasePolygon p = polygonal_interpolant(r.path, r.momenta);
  for (int k = 0; k < 37; ++k) {
    const PhaseState st = p.evaluate(r.path.grid().node(k));
    CHECK(st.y == r.path.node(k));
    CHECK(st.z == r.momenta.z[k]);
  }
  CHECK(p.evaluate(1.0).z == r.momenta.z.back());
}

TEST_CASE("polygon Lipschitz constant bounds increments") {
  const SolveResult r = minimize_discrete(ho_two_point(), 20, initial_guess(ho_two_point(), 20, InitStrategy::straight_line));
  const PhasePolygon p = polygonal_interpolant(r.path, r.momenta);
  const double L = p.lipschitz_constant();
  for (int i = 0; i < 200; ++i) {
    const double a = i / 200.0;
    const double b = a + 0.0037;
    const PhaseState pa = p.evaluate(a);
    const PhaseState pb = p.evaluate(std::min(b, 1.0));
    CHECK(std::max(max_abs(pa.y - pb.y), max_abs(pa.z - pb.z)) <= L * (std::min(b, 1.0) - a) * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("polygon distance examples") {
  const Problem p = fp_two_point();
  const SolveResult a = minimize_discrete(p, 16, initial_guess(p, 16, InitStrategy::straight_line));
  const SolveResult b = minimize_discrete(p, 32, initial_guess(p, 32, InitStrategy::straight_line));
  const PhasePolygon pa = polygonal_interpolant(a.path, a.momenta);
  const PhasePolygon pb = polygonal_interpolant(b.path, b.momenta);
  CHECK(polygon_distance(pa, pa, 100) == 0.0);
  CHECK(polygon_distance(pa, pb, 100) <= 1e-10);

  std::vector<Vec> shifted = pa.positions();
  for (Vec& v : shifted) v[0] += 0.3;
  std::vector<Vec> z(pa.momenta().begin(), pa.momenta().end() - 1);
  const PhasePolygon ps(pa.grid(), shifted, z);
  CHECK(polygon_distance(pa, ps, 50) == doctest::Approx(0.3).epsilon(1e-14));

  const PhasePolygon other(Grid(2.0, 2), {vec({0.0}), vec({0.5}), vec({1.0})}, {vec({1.0}), vec({1.0})});
  CHECK_THROWS_AS(polygon_distance(pa, other, 10), ContractError);
}

TEST_CASE("reference flow examples") {
  const LagrangianModel fp = catalog("free_particle");
  for (int steps : {1, 7, 100}) {
    const FlowCurves f = reference_flow(fp, vec({0.0}), vec({1.0}), 0.0, 1.0, steps);
    // Exact up to rounding in the accumulated steps.
    CHECK(std::abs(f.position.y.back()[0] - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
    CHECK(f.momentum.y.back()[0] == 1.0);
    CHECK(f.position.size() == static_cast<std::size_t>(steps + 1));
  }
  const double half_pi = std::numbers::pi / 2;
  const FlowCurves h = reference_flow(catalog("harmonic_oscillator"), vec({0.0}), vec({1.0}), 0.0, half_pi, 1000);
  CHECK(std::abs(h.position.y.back()[0] - 1.0) <= 1e-9);
  CHECK(std::abs(h.momentum.y.back()[0]) <= 1e-9);
  CHECK_THROWS_AS(reference_flow(fp, vec({0.0}), vec({1.0}), 0.0, 1.0, 0), ContractError);

  // Backward integration returns samples in increasing time.
  const FlowCurves back = reference_flow(catalog("harmonic_oscillator"), vec({1.0}), vec({0.0}), half_pi, 0.0, 1000);
  CHECK(back.position.s.front() == doctest::Approx(0.0));
  CHECK(std::abs(back.position.y.front()[0]) <= 1e-9);
  CHECK(std::abs(back.momentum.y.front()[0] - 1.0) <= 1e-9);
}

TEST_CASE("reference flow blow-up is a completeness failure") {
  // L = xi^2/2 + x^4/4, i.e. potential -x^4/4: the flow escapes in finite time.
  const LagrangianModel m("escape", 1, [](const Vec& x, double, const Vec& xi) {
    const double q = x[0];
    return LagrangianEval{0.5 * xi[0] * xi[0] + 0.25 * q * q * q * q, Vec::Constant(1, q * q * q), xi,
                          Mat::Identity(1, 1)};
  });
  CHECK_THROWS_AS(reference_flow(m, vec({2.0}), vec({5.0}), 0.0, 50.0, 500), CompletenessError);
}

TEST_CASE("continuous action examples") {
  const Problem fp = fp_two_point();
  const SampledCurve line = sample([](double s) { return s; }, [](double) { return 1.0; }, 1.0, 100);
  CHECK(std::abs(continuous_action(fp, line).value - 0.5) <= 1e-12);
  const SampledCurve still = sample([](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, 10);
  const Problem fp0 = Problem::two_point(catalog("free_particle"), 1.0, vec({0.0}), vec({0.0}));
  CHECK(continuous_action(fp0, still).value == 0.0);

  const double s1 = std::sin(1.0);
  const SampledCurve ext = sample([s1](double s) { return std::sin(s) / s1; },
                                  [s1](double s) { return std::cos(s) / s1; }, 1.0, 10000);
  const QuadratureResult q = continuous_action(ho_two_point(), ext);
  CHECK(std::abs(q.value - kHalfCot1) <= 1e-8);
  CHECK_FALSE(q.trapezoid_tail);
  CHECK(q.error_estimate <= 1e-8);

  const SampledCurve odd = sample([s1](double s) { return std::sin(s) / s1; },
                                  [s1](double s) { return std::cos(s) / s1; }, 1.0, 10001);
  const QuadratureResult qo = continuous_action(ho_two_point(), odd);
  CHECK(qo.trapezoid_tail);
  CHECK(std::abs(qo.value - kHalfCot1) <= 1e-8);

  // Bolza adds w(gamma(0)).
  const Problem b = Problem::bolza(catalog("free_particle"), 1.0, vec({1.0}), TerminalCost::quadratic(1.0, vec({0.0})));
  const SampledCurve bl = sample([](double s) { return 0.5 + 0.5 * s; }, [](double) { return 0.5; }, 1.0, 64);
  CHECK(std::abs(continuous_action(b, bl).value - 0.25) <= 1e-12);

  SampledCurve no_dy = line;
  no_dy.dy.clear();
  CHECK_THROWS_AS(continuous_action(fp, no_dy), ContractError);
}

TEST_CASE("el_residual examples") {
  const LagrangianModel fp = catalog("free_particle");
  const LagrangianModel ho = catalog("harmonic_oscillator");
  const SampledCurve line = sample([](double s) { return 2 * s; }, [](double) { return 2.0; }, 1.0, 50);
  CHECK(el_residual(fp, line) <= 1e-12);
  const double s1 = std::sin(1.0);
  const SampledCurve ext = sample([s1](double s) { return std::sin(s) / s1; },
                                  [s1](double s) { return std::cos(s) / s1; }, 1.0, 999);
  CHECK(el_residual(ho, ext) <= 1e-5);
  CHECK(first_variation_oscillation(ho, ext) <= 1e-6);
  const SampledCurve parabola = sample([](double s) { return s * s; }, [](double s) { return 2 * s; }, 1.0, 999);
  CHECK(el_residual(ho, parabola) >= 1.0);
  CHECK(first_variation_oscillation(ho, parabola) >= 0.5);
}

TEST_CASE("free particle refinement is exact") {
  const ConvergenceReport r = refine_study(fp_two_point(), 8, 4);
  CHECK(r.verdict == Verdict::exact);
  CHECK_FALSE(r.truncated);
  REQUIRE(r.levels.size() == 4);
  for (const LevelRecord& l : r.levels) {
    CHECK(std::abs(l.action - 0.5) <= 1e-10);
    if (l.distance_to_next) CHECK(*l.distance_to_next <= 1e-10);
  }
  CHECK_THROWS_AS(refine_study(fp_two_point(), 8, 1), ContractError);
  CHECK_THROWS_AS(refine_study(fp_two_point(), 1, 3), ContractError);
}

TEST_CASE("harmonic oscillator refinement is first order") {
  const ConvergenceReport r = refine_study(ho_two_point(), 16, 6);
  CHECK(r.verdict == Verdict::first_order);
  REQUIRE(r.observed_orders.size() == 4);
  for (double o : r.observed_orders) {
    CHECK(o >= 0.8);
    CHECK(o <= 1.2);
  }
  for (std::size_t j = 1; j < r.levels.size(); ++j) CHECK(r.levels[j].K == 2 * r.levels[j - 1].K);
  CHECK(std::abs(r.levels.back().action - kHalfCot1) <= 2e-3);
  // Riemann sums and polygon quadrature approach each other.
  const auto gap = [](const LevelRecord& l) { return std::abs(l.action - l.polygon_action); };
  CHECK(gap(r.levels.back()) < gap(r.levels.front()));
  // distance_to_oracle / h is stable over the last three levels.
  std::vector<double> c;
  for (std::size_t j = r.levels.size() - 3; j < r.levels.size(); ++j) {
    REQUIRE(r.levels[j].distance_to_oracle.has_value());
    c.push_back(*r.levels[j].distance_to_oracle / r.levels[j].h);
  }
  CHECK(*std::max_element(c.begin(), c.end()) <= 2.0 * *std::min_element(c.begin(), c.end()));
  for (double o : r.el_orders) CHECK(o >= 0.8);
}

TEST_CASE("mechanical model refinement is first order") {
  const Problem p = Problem::two_point(catalog("mechanical", 1, {{"amplitude", 0.5}}), 1.0, vec({0.0}), vec({1.0}));
  const ConvergenceReport r = refine_study(p, 16, 5);
  CHECK(r.verdict == Verdict::first_order);
  for (double o : r.observed_orders) {
    CHECK(o >= 0.8);
    CHECK(o <= 1.2);
  }
}

TEST_CASE("truncated study is inconclusive") {
  StudyOptions o;
  o.solve.max_iter = 1;
  const ConvergenceReport r = refine_study(ho_two_point(), 8, 3, o);
  CHECK(r.truncated);
  CHECK(r.verdict == Verdict::inconclusive);
}

TEST_CASE("refinement is independent of the thread count") {
  StudyOptions one;
  one.threads = 1;
  StudyOptions four;
  four.threads = 4;
  const ConvergenceReport a = refine_study(ho_two_point(), 8, 4, one);
  const ConvergenceReport b = refine_study(ho_two_point(), 8, 4, four);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t j = 0; j < a.levels.size(); ++j) CHECK(a.levels[j].action == b.levels[j].action);
  CHECK(a.observed_orders == b.observed_orders);
}

TEST_CASE("mollify examples") {
  const EndpointSpec ends{vec({0.0}), vec({1.0})};
  const SampledCurve line = sample([](double s) { return s; }, [](double) { return 1.0; }, 1.0, 1024);
  for (double eps : {0.2, 0.05, 0.01}) {
    const SampledCurve m = mollify_curve(line, eps, ends);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(std::abs(m.y[i][0] - line.y[i][0]) <= 1e-12);
      CHECK(std::abs(m.dy[i][0] - 1.0) <= 1e-10);
    }
  }
  const SampledCurve flat = sample([](double) { return 0.7; }, [](double) { return 0.0; }, 1.0, 256);
  for (Extension e : {Extension::reflect, Extension::constant}) {
    const SampledCurve m = mollify_curve(flat, 0.1, {vec({0.7}), vec({0.7})}, e);
    for (const Vec& v : m.y) CHECK(v[0] == doctest::Approx(0.7).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mollify_curve(line, 0.25, ends), ContractError);
  CHECK_THROWS_AS(mollify_curve(line, 0.0, ends), ContractError);

  const SampledCurve zig = zigzag_curve(vec({0.0}), vec({1.0}), 1.0, 8, 2.0, 4096);
  double M = 0.0;
  for (const Vec& v : zig.dy) M = std::max(M, std::abs(v[0]));
  CHECK(M == 3.0);
  for (double eps : {0.125, 0.03125, 0.005}) {
    const SampledCurve m = mollify_curve(zig, eps, ends);
    CHECK(m.y.front()[0] == 0.0);
    CHECK(m.y.back()[0] == 1.0);
    double slope = 0.0;
    for (const Vec& v : m.dy) slope = std::max(slope, std::abs(v[0]));
    // Convex combination of slopes, up to rounding.
    CHECK(slope <= M + 1e-12);
  }

  // Free left end keeps gamma(0).
  const SampledCurve shifted = sample([](double s) { return 0.3 + s * s; }, [](double s) { return 2 * s; }, 1.0, 512);
  const SampledCurve fm = mollify_curve(shifted, 0.05, {std::nullopt, vec({1.3})});
  CHECK(fm.y.front()[0] == 0.3);
  CHECK(fm.y.back()[0] == 1.3);
}

TEST_CASE("mollification study examples") {
  const Problem fp = fp_two_point();
  std::vector<double> eps;
  for (int i = 0; i <= 5; ++i) eps.push_back(0.125 / (1 << i));

  const SampledCurve line = sample([](double s) { return s; }, [](double) { return 1.0; }, 1.0, 4096);
  const MollificationStudy a = mollification_study(fp, line, eps, 0.5);
  for (const MollificationRow& r : a.rows) {
    CHECK(std::abs(r.action - 0.5) <= 1e-10);
    CHECK(std::abs(r.difference) <= 1e-10);
  }

  const SampledCurve zig = zigzag_curve(vec({0.0}), vec({1.0}), 1.0, 8, 2.0, 4096);
  const MollificationStudy z = mollification_study(fp, zig, eps, 0.5);
  CHECK(z.all_dominated);
  CHECK(z.differences_decreasing);
  CHECK(std::abs(z.raw_action - 2.5) <= 1e-3);
  for (const MollificationRow& r : z.rows) {
    CHECK(r.action >= 0.5);
    CHECK(r.endpoint_error <= 1e-12);
  }
  CHECK_THROWS_AS(mollification_study(fp, zig, {0.01, 0.02}, 0.5), ContractError);

  // A minimizer action above the mollified actions is reported, not hidden.
  const MollificationStudy fail = mollification_study(fp, zig, eps, 1.0);
  CHECK_FALSE(fail.all_dominated);
}

TEST_CASE("optimality against comparison curves") {
  const Problem p = ho_two_point();
  const ConvergenceReport r = refine_study(p, 16, 6);
  const double finest = r.levels.back().action;
  const auto family = comparison_family(p, 20, 4, 0.5, 10001, 2024);
  CHECK(family.size() == 20);
  for (const SampledCurve& c : family) {
    CHECK(c.y.front()[0] == 0.0);
    CHECK(c.y.back()[0] == 1.0);
    CHECK(finest <= continuous_action(p, c).value + 1e-8);
  }
}

TEST_CASE("sampled curve validation") {
  SampledCurve c;
  c.s = {0.0, 0.5, 0.5};
  c.y = {vec({0.0}), vec({0.0}), vec({0.0})};
  CHECK_THROWS_AS(c.validate(), ContractError);
  const SampledCurve p = with_polyline_derivatives(
      sample([](double s) { return s * s; }, [](double) { return 0.0; }, 1.0, 4));
  CHECK(p.dy[0][0] == doctest::Approx(0.25));
  CHECK(p.dy.back()[0] == doctest::Approx(1.75));
}
