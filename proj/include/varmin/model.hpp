#pragma once

#include "varmin/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace varmin {

using Params = std::map<std::string, double>;

/// Value and first/second velocity derivatives of L(x, t, xi).
struct LagrangianEval {
  double value = 0.0;
  Vec dx;       // dL/dx
  Vec dxi;      // dL/dxi
  Mat hess_xi;  // d2L/dxi2
};

/// Second derivatives used by the Newton solver. xxi(i, j) = d2L / dx_i dxi_j.
struct SecondDerivatives {
  Mat xx;
  Mat xxi;
  Mat xixi;
};

/// A Lagrangian L(x, t, xi) on R^d x R x R^d together with the metadata the
/// solver and the condition checker need.
///
/// The superlinearity map a -> b_a gives L(x,t,xi) >= a|xi| + b_a. Models with
/// an unbounded-below potential may declare it against a "superlinear part"
/// (typically the kinetic energy) instead of L itself.
class LagrangianModel {
 public:
  using EvalFn = std::function<LagrangianEval(const Vec&, double, const Vec&)>;
  using SecondFn = std::function<SecondDerivatives(const Vec&, double, const Vec&)>;
  using ScalarFn = std::function<double(const Vec&, double, const Vec&)>;
  using BoundFn = std::function<double(double)>;

  LagrangianModel(std::string name, int dim, EvalFn eval);

  LagrangianModel& with_params(Params params);
  LagrangianModel& with_second_derivatives(SecondFn second);
  /// Declares an exact b_a. `part` defaults to L itself.
  LagrangianModel& with_superlinearity(BoundFn bound, ScalarFn part = {});
  /// A known positive lower bound of the smallest velocity-Hessian eigenvalue.
  LagrangianModel& with_hessian_floor(double floor);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  const Params& params() const noexcept { return params_; }

  /// Evaluates L and its derivatives; throws ModelEvaluationError on
  /// non-finite input or output and ModelDefinitionError on wrong shapes.
  LagrangianEval eval(const Vec& x, double t, const Vec& xi) const;

  /// Analytic second derivatives when supplied, central differences of the
  /// analytic gradients otherwise.
  SecondDerivatives second_derivatives(const Vec& x, double t, const Vec& xi) const;
  bool has_analytic_second_derivatives() const noexcept { return static_cast<bool>(second_); }

  bool has_exact_superlinearity() const noexcept { return static_cast<bool>(bound_); }
  /// Exact b_a, if declared.
  std::optional<double> superlinearity(double a) const;
  /// The function the superlinearity bound is declared against.
  double superlinear_part(const Vec& x, double t, const Vec& xi) const;
  bool superlinearity_on_part() const noexcept { return static_cast<bool>(part_); }

  std::optional<double> hessian_floor() const noexcept { return hessian_floor_; }

 private:
  std::string name_;
  int dim_;
  EvalFn eval_;
  SecondFn second_;
  BoundFn bound_;
  ScalarFn part_;
  Params params_;
  std::optional<double> hessian_floor_;
};

/// Terminal cost w on the free endpoint, with w(x) >= -alpha|x| + beta.
class TerminalCost {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  TerminalCost(std::string name, ValueFn value, GradFn grad, double alpha, double beta,
               HessFn hess = {});

  /// w = 0.
  static TerminalCost zero(int dim);
  /// w = weight/2 |x - center|^2, weight >= 0.
  static TerminalCost quadratic(double weight, Vec center);
  /// w = slope . x.
  static TerminalCost linear(Vec slope);

  const std::string& name() const noexcept { return name_; }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  /// Analytic when supplied, central differences of the gradient otherwise.
  Mat hessian(const Vec& x) const;
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  const Params& params() const noexcept { return params_; }
  TerminalCost& with_params(Params params);

 private:
  std::string name_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  double alpha_;
  double beta_;
  Params params_;
};

// --- catalog ---------------------------------------------------------------

/// Names accepted by catalog_lookup.
const std::vector<std::string>& catalog_names();

/// Builds a catalog model.
///
///   free_particle         L = |xi|^2 / 2
///   harmonic_oscillator   L = |xi|^2 / 2 - omega^2 |x|^2 / 2          {omega = 1}
///   anisotropic_quadratic L = sum_i m_i xi_i^2 / 2                     {mass = 1, mass<i>}
///   mechanical            L = |xi|^2 / 2 - A sum_i cos(k x_i)          {amplitude = 1, wavenumber = 1}
///
/// Every catalog model carries an exact b_a and a complete flow. Throws
/// LookupError on unknown names or parameters, ModelDefinitionError on dim < 1
/// or non-positive masses.
LagrangianModel catalog_lookup(const std::string& name, const Params& params, int dim);

/// L = xi^T M xi / 2 - x^T S x / 2 with user-chosen M and S. Not part of the
/// catalog: no exact b_a and no completeness guarantee.
LagrangianModel make_quadratic_model(std::string name, Mat mass, Mat stiffness);

// --- condition checks -------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Coordinate box for (x, t, xi) sampling.
struct SampleBox {
  std::vector<Interval> x;
  Interval t;
  std::vector<Interval> xi;

  static SampleBox cube(int dim, double lo, double hi);
};

struct SamplePoint {
  Vec x;
  double t = 0.0;
  Vec xi;
};

struct ConditionCheck {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;
  /// The extreme value found (eigenvalue or slack).
  double extreme = 0.0;
  std::optional<SamplePoint> witness;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  double min_hessian_eigenvalue = 0.0;
  double worst_superlinearity_slack = 0.0;
  std::optional<double> worst_terminal_slack;
  /// b_a values used, keyed by a.
  std::map<double, double> b_values;
  bool superlinearity_approximate = false;

  bool pass() const;
  const ConditionCheck* find(const std::string& name) const;
};

struct ConditionOptions {
  std::vector<double> a_values{0.0, 1.0, 2.0};
  std::uint64_t seed = 0x5eed;
  double slack_tolerance = 1e-12;
};

SamplePoint draw_sample(const SampleBox& box, std::uint64_t seed, int index);

/// Sampling-based check of positive definiteness and superlinearity, plus the
/// terminal-cost growth bound when `w` is given.
ConditionReport check_conditions(const LagrangianModel& model, const TerminalCost* w,
                                 const SampleBox& box, int n_samples,
                                 const ConditionOptions& opts = {});

/// min over samples of L - a|xi|: the estimate of b_a for models without one.
double estimate_superlinearity(const LagrangianModel& model, const SampleBox& box,
                               int n_samples, double a, std::uint64_t seed = 0x5eed);

}  // namespace varmin
