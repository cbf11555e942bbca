#include "helpers.hpp"

using namespace varmin;
using testing::catalog;
using testing::vec;

TEST_CASE("free particle evaluation at rest and in motion") {
  const LagrangianModel m = catalog("free_particle");
  LagrangianEval e = m.eval(vec({0.3}), 0.0, vec({0.0}));
  CHECK(e.value == 0.0);
  CHECK(e.dx[0] == 0.0);
  CHECK(e.dxi[0] == 0.0);
  CHECK(e.hess_xi(0, 0) == 1.0);

  e = m.eval(vec({0.0}), 0.0, vec({2.0}));
  CHECK(e.value == 2.0);
  CHECK(e.dx[0] == 0.0);
  CHECK(e.dxi[0] == 2.0);
  CHECK(e.hess_xi(0, 0) == 1.0);
}

TEST_CASE("harmonic oscillator hand evaluation") {
  const LagrangianModel m = catalog("harmonic_oscillator", 1, {{"omega", 1.0}});
  const LagrangianEval e = m.eval(vec({1.0}), 0.0, vec({1.0}));
  CHECK(std::abs(e.value) < 1e-15);
  CHECK(e.dx[0] == -1.0);
  CHECK(e.dxi[0] == 1.0);
  CHECK(e.hess_xi(0, 0) == 1.0);
}

TEST_CASE("non-finite evaluation is reported with the point") {
  const LagrangianModel bad("bad", 1, [](const Vec&, double, const Vec& xi) {
    return LagrangianEval{std::log(xi[0]), Vec::Zero(1), Vec::Ones(1), Mat::Identity(1, 1)};
  });
  CHECK_THROWS_AS(bad.eval(vec({0.0}), 0.0, vec({-1.0})), ModelEvaluationError);
  const LagrangianModel m = catalog("free_particle");
  CHECK_THROWS_AS(m.eval(vec({NAN}), 0.0, vec({0.0})), ModelEvaluationError);
  try {
    bad.eval(vec({0.0}), 0.0, vec({-1.0}));
  } catch (const ModelEvaluationError& e) {
    CHECK(std::string(e.what()).find("xi=") != std::string::npos);
  }
}

TEST_CASE("catalog lookup") {
  CHECK(catalog_names().size() == 4);
  for (const auto& name : catalog_names()) CHECK(catalog_lookup(name, {}, 1).name() == name);

  // free particle: H = p^2/2 is its conjugate; L(xi) = max_p (p xi - H) = xi^2/2.
  const LagrangianModel fp = catalog_lookup("free_particle", {}, 1);
  for (double xi : {-1.5, 0.2, 3.0}) CHECK(fp.eval(vec({0.0}), 0.0, vec({xi})).value == 0.5 * xi * xi);

  const LagrangianModel ho = catalog_lookup("harmonic_oscillator", {{"omega", 1.0}}, 1);
  CHECK(ho.eval(vec({2.0}), 0.0, vec({1.0})).value == doctest::Approx(0.5 - 2.0));

  CHECK_THROWS_AS(catalog_lookup("free_particle", {}, 0), ModelDefinitionError);
  CHECK_THROWS_AS(catalog_lookup("pendulum", {}, 1), LookupError);
  CHECK_THROWS_AS(catalog_lookup("harmonic_oscillator", {{"omgea", 1.0}}, 1), LookupError);
  CHECK_THROWS_AS(catalog_lookup("anisotropic_quadratic", {{"mass", -1.0}}, 1), ModelDefinitionError);
  try {
    catalog_lookup("pendulum", {}, 1);
  } catch (const LookupError& e) {
    CHECK(std::string(e.what()).find("free_particle") != std::string::npos);
  }
}

TEST_CASE("check_conditions on the free particle") {
  const LagrangianModel m = catalog("free_particle");
  const ConditionReport r = check_conditions(m, nullptr, SampleBox::cube(1, -1.0, 1.0), 100);
  CHECK(r.pass());
  CHECK(r.min_hessian_eigenvalue == 1.0);
  for (const auto& c : r.checks) {
    if (c.pass) CHECK(c.worst_violation == 0.0);
  }
  CHECK_FALSE(r.superlinearity_approximate);
}

TEST_CASE("harmonic oscillator superlinearity is declared on the kinetic part") {
  const LagrangianModel m = catalog("harmonic_oscillator");
  REQUIRE(m.superlinearity(1.0).has_value());
  CHECK(*m.superlinearity(1.0) == -0.5);
  CHECK(m.superlinearity_on_part());
  const ConditionReport r = check_conditions(m, nullptr, SampleBox::cube(1, -5.0, 5.0), 500);
  const ConditionCheck* s = r.find("superlinearity");
  REQUIRE(s != nullptr);
  CHECK(s->pass);
  // L itself is not bounded by |xi| - 1/2 globally.
  CHECK(m.eval(vec({5.0}), 0.0, vec({0.0})).value < -0.5);
}

TEST_CASE("degenerate Hessian fails positive definiteness") {
  const LagrangianModel m = make_quadratic_model("flat", Mat::Zero(1, 1), Mat::Zero(1, 1));
  const ConditionReport r = check_conditions(m, nullptr, SampleBox::cube(1, -1.0, 1.0), 50);
  CHECK_FALSE(r.pass());
  const ConditionCheck* pd = r.find("positive_definite");
  REQUIRE(pd != nullptr);
  CHECK_FALSE(pd->pass);
  CHECK(pd->extreme == 0.0);
  CHECK(pd->worst_violation == 0.0);
  CHECK(pd->witness.has_value());
}

TEST_CASE("asymmetric Hessian is a model-definition error") {
  const LagrangianModel m("skew", 2, [](const Vec&, double, const Vec& xi) {
    Mat h(2, 2);
    h << 1.0, 0.5, 0.0, 1.0;
    return LagrangianEval{0.5 * xi.squaredNorm(), Vec::Zero(2), xi, h};
  });
  CHECK_THROWS_AS(check_conditions(m, nullptr, SampleBox::cube(2, -1.0, 1.0), 10), ModelDefinitionError);
}

TEST_CASE("terminal cost growth bound") {
  const TerminalCost q = TerminalCost::quadratic(1.0, vec({0.0}));
  CHECK(q.alpha() == 0.0);
  CHECK(q.beta() == 0.0);
  CHECK(q.value(vec({2.0})) == 2.0);
  CHECK(q.gradient(vec({2.0}))[0] == 2.0);
  const TerminalCost lin = TerminalCost::linear(vec({-3.0, 4.0}));
  CHECK(lin.alpha() == doctest::Approx(5.0));
  const LagrangianModel m = catalog("free_particle", 2);
  const ConditionReport r = check_conditions(m, &lin, SampleBox::cube(2, -5.0, 5.0), 300);
  CHECK(r.pass());
  REQUIRE(r.worst_terminal_slack.has_value());
  CHECK(*r.worst_terminal_slack >= -1e-12);
  // A cost that dips below its declared bound is caught.
  const TerminalCost liar("liar", [](const Vec& x) { return -2.0 * x.norm(); },
                          [](const Vec& x) { return Vec(-2.0 * x / std::max(x.norm(), 1e-300)); }, 1.0, 0.0);
  const ConditionReport bad = check_conditions(m, &liar, SampleBox::cube(2, -5.0, 5.0), 300);
  CHECK_FALSE(bad.pass());
}

TEST_CASE("user models get an approximate superlinearity constant") {
  Mat mass(2, 2);
  mass << 2.0, 0.5, 0.5, 1.0;
  const LagrangianModel m = make_quadratic_model("q", mass, Mat::Zero(2, 2));
  CHECK_FALSE(m.has_exact_superlinearity());
  const ConditionReport r = check_conditions(m, nullptr, SampleBox::cube(2, -2.0, 2.0), 400);
  CHECK(r.superlinearity_approximate);
  CHECK(r.pass());
  CHECK(r.b_values.size() == 3);
}

TEST_CASE("catalog invariants on random points") {
  const SampleBox box5_1 = SampleBox::cube(1, -5.0, 5.0);
  const SampleBox box5_2 = SampleBox::cube(2, -5.0, 5.0);
  for (const LagrangianModel& m : testing::all_catalog_models()) {
    CAPTURE(m.name());
    CAPTURE(m.dim());
    const SampleBox& box = m.dim() == 1 ? box5_1 : box5_2;
    const ConditionReport r = check_conditions(m, nullptr, box, 1000);
    CHECK(r.pass());
    REQUIRE(m.hessian_floor().has_value());
    CHECK(r.min_hessian_eigenvalue >= *m.hessian_floor());

    // Superlinearity slack for a in {0, 1, 2} sampled directly.
    for (int i = 0; i < 1000; ++i) {
      const SamplePoint s = draw_sample(box, 17, i);
      for (double a : {0.0, 1.0, 2.0}) {
        CHECK(m.superlinear_part(s.x, s.t, s.xi) - a * s.xi.norm() - *m.superlinearity(a) >= -1e-12);
      }
    }
  }
}

TEST_CASE("eval derivatives match central differences") {
  for (const LagrangianModel& m : testing::all_catalog_models()) {
    CAPTURE(m.name());
    const SampleBox box = SampleBox::cube(m.dim(), -3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
      const SamplePoint s = draw_sample(box, 99, i);
      const LagrangianEval e = m.eval(s.x, s.t, s.xi);
      for (int j = 0; j < m.dim(); ++j) {
        const double hx = 1e-6 * (1.0 + std::abs(s.x[j]));
        Vec xp = s.x, xm = s.x;
        xp[j] += hx;
        xm[j] -= hx;
        const double fdx = (m.eval(xp, s.t, s.xi).value - m.eval(xm, s.t, s.xi).value) / (2 * hx);
        CHECK(std::abs(fdx - e.dx[j]) <= 1e-6 * std::max(1.0, std::abs(e.dx[j])));

        const double hv = 1e-6 * (1.0 + std::abs(s.xi[j]));
        Vec vp = s.xi, vm = s.xi;
        vp[j] += hv;
        vm[j] -= hv;
        const double fdv = (m.eval(s.x, s.t, vp).value - m.eval(s.x, s.t, vm).value) / (2 * hv);
        CHECK(std::abs(fdv - e.dxi[j]) <= 1e-6 * std::max(1.0, std::abs(e.dxi[j])));

        const Vec fdh = (m.eval(s.x, s.t, vp).dxi - m.eval(s.x, s.t, vm).dxi) / (2 * hv);
        CHECK(testing::max_abs(fdh - e.hess_xi.col(j)) <= 1e-6 * std::max(1.0, e.hess_xi.cwiseAbs().maxCoeff()));
      }
      // Analytic second derivatives agree with the finite-difference fallback.
      const SecondDerivatives sd = m.second_derivatives(s.x, s.t, s.xi);
      CHECK(sd.xixi.isApprox(e.hess_xi, 1e-12));
    }
  }
}

TEST_CASE("draw_sample is deterministic and inside the box") {
  const SampleBox box = SampleBox::cube(3, -2.0, 1.0);
  const SamplePoint a = draw_sample(box, 5, 7);
  const SamplePoint b = draw_sample(box, 5, 7);
  CHECK(a.x == b.x);
  CHECK(a.xi == b.xi);
  CHECK(a.t == b.t);
  CHECK(a.x.maxCoeff() <= 1.0);
  CHECK(a.x.minCoeff() >= -2.0);
  CHECK_FALSE(draw_sample(box, 6, 7).x == a.x);
}
