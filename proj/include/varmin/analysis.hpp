#pragma once

#include "varmin/solve.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace varmin {

// --- sampled curves -------------------------------------------------------------

/// Curve samples at strictly increasing times, with optional derivatives.
struct SampledCurve {
  std::vector<double> s;
  std::vector<Vec> y;
  std::vector<Vec> dy;  // empty when absent

  std::size_t size() const noexcept { return s.size(); }
  bool has_derivatives() const noexcept { return !dy.empty(); }
  int dim() const { return y.empty() ? 0 : static_cast<int>(y.front().size()); }
  /// Uniform spacing within a relative tolerance of 1e-9.
  bool uniform() const;
  /// Throws ContractError on inconsistent sizes or non-increasing times.
  void validate() const;
};

/// Adds derivatives by reading the samples as a polyline: the slope of the
/// segment to the right of each sample (the last sample takes its left slope).
SampledCurve with_polyline_derivatives(SampledCurve curve);

// --- Euler-Cauchy polygons --------------------------------------------------------

struct PhaseState {
  Vec y;
  Vec z;
};

/// Piecewise-linear interpolant of positions y_0..y_K and momenta z_0..z_{K-1}
/// on the grid; the momentum at t_K repeats z_{K-1}.
class PhasePolygon {
 public:
  PhasePolygon(Grid grid, std::vector<Vec> y, std::vector<Vec> z);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<Vec>& positions() const noexcept { return y_; }
  /// K + 1 momentum nodes (the last one is the extension).
  const std::vector<Vec>& momenta() const noexcept { return z_; }

  /// Node values are reproduced exactly at s = t_k.
  PhaseState evaluate(double s) const;
  /// max_k max(|y'_k|, |z'_k|).
  double lipschitz_constant() const;
  /// Nodes t_0..t_{K-1} with the forward slopes y'_k as derivatives.
  SampledCurve node_curve() const;

 private:
  Grid grid_;
  std::vector<Vec> y_;
  std::vector<Vec> z_;
};

PhasePolygon polygonal_interpolant(const DiscretePath& path, const MomentumPath& momenta);

/// Max over n_probe uniform probes and both node sets of the phase-space
/// max-norm distance.
double polygon_distance(const PhasePolygon& a, const PhasePolygon& b, int n_probe);

/// Max phase-space distance between a polygon and a sampled (position,
/// momentum) pair, over the sample times.
double polygon_flow_distance(const PhasePolygon& poly, const SampledCurve& position,
                             const SampledCurve& momentum);

/// Sum over segments of a 3-point Simpson rule with the segment slope, plus w.
double polygon_action(const Problem& problem, const PhasePolygon& poly);

// --- reference flow -------------------------------------------------------------

struct FlowCurves {
  SampledCurve position;  // derivatives are dH/dp
  SampledCurve momentum;  // derivatives are -dH/dx
};

/// Classical RK4 integration of Hamilton's equations from (x0, p0) at t0 to t1
/// with `steps` equal steps. Samples come back in increasing time order even
/// when t1 < t0. Throws CompletenessError if the state stops being finite.
FlowCurves reference_flow(const LagrangianModel& model, const Vec& x0, const Vec& p0, double t0,
                          double t1, int steps);

// --- continuous action and Euler-Lagrange checks ----------------------------------

struct QuadratureResult {
  double value = 0.0;
  /// |value - value on every other sample|.
  double error_estimate = 0.0;
  /// Odd interval count: the last interval used the trapezoid rule.
  bool trapezoid_tail = false;
};

/// Composite Simpson quadrature of L along a uniformly sampled curve with
/// derivatives, plus w(gamma(0)) for Bolza problems.
QuadratureResult continuous_action(const Problem& problem, const SampledCurve& curve);

/// max over interior samples of |D_s dL/dxi - dL/dx| with central differences.
double el_residual(const LagrangianModel& model, const SampledCurve& curve);

/// Oscillation (max - min, worst component) of
/// dL/dxi(gamma(s)) - int_0^s dL/dx(gamma) along the curve. Zero on extremals.
double first_variation_oscillation(const LagrangianModel& model, const SampledCurve& curve);

// --- refinement study -----------------------------------------------------------

enum class Verdict { exact, first_order, inconclusive };
std::string to_string(Verdict v);

struct LevelRecord {
  int K = 0;
  double h = 0.0;
  double action = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double hamilton_residual = 0.0;
  double el_residual = 0.0;
  double polygon_action = 0.0;
  std::optional<double> distance_to_next;
  std::optional<double> distance_to_oracle;
};

struct ConvergenceReport {
  std::vector<LevelRecord> levels;
  /// log2(d_j / d_{j+1}) for successive polygon distances.
  std::vector<double> observed_orders;
  /// log2 ratios of successive el_residual values.
  std::vector<double> el_orders;
  Verdict verdict = Verdict::inconclusive;
  bool truncated = false;
  int anchor_k = 0;
  double anchor_t = 0.0;
  std::string note;
};

struct StudyOptions {
  SolveOptions solve;
  std::optional<InitStrategy> init;  // default: straight_line
  int n_probe = 0;                   // 0: 4 K_finest
  double exact_tol = 1e-10;
  double order_lo = 0.8;
  double order_hi = 1.2;
  bool oracle = true;
  int oracle_substeps = 16;  // oracle step = h_finest / oracle_substeps
  unsigned threads = 0;
};

/// Solves at K = K0 2^j for j < levels and measures polygon convergence.
ConvergenceReport refine_study(const Problem& problem, int K0, int levels,
                               const StudyOptions& opts = {});

/// Per-level solutions used by refine_study, exposed for callers that need
/// the polygons themselves.
std::vector<SolveResult> solve_levels(const Problem& problem, int K0, int levels,
                                      const StudyOptions& opts = {});

// --- mollification ----------------------------------------------------------------

enum class Extension { reflect, constant };

struct EndpointSpec {
  std::optional<Vec> left;  // nullopt: free, keep gamma(0)
  Vec right;
};

EndpointSpec endpoints_for(const Problem& problem);

/// Convolution with the normalized standard bump of radius eps on the
/// sample grid, followed by the affine endpoint correction. Requires a
/// uniformly sampled curve and eps < t/4.
SampledCurve mollify_curve(const SampledCurve& curve, double eps, const EndpointSpec& endpoints,
                           Extension extension = Extension::reflect);

struct MollificationRow {
  double eps = 0.0;
  double action = 0.0;
  double difference = 0.0;  // action - raw action
  bool dominated = false;   // minimizer_action <= action (1e-10 slack)
  double endpoint_error = 0.0;
  double max_slope = 0.0;
  double first_variation = 0.0;
};

struct MollificationStudy {
  double raw_action = 0.0;
  double minimizer_action = 0.0;
  std::vector<MollificationRow> rows;
  bool all_dominated = false;
  bool differences_decreasing = false;
};

MollificationStudy mollification_study(const Problem& problem, const SampledCurve& curve,
                                       const std::vector<double>& eps_list,
                                       double minimizer_action,
                                       Extension extension = Extension::reflect);

// --- test curves ----------------------------------------------------------------

/// Piecewise-linear zigzag from `start` to `end` on [0, t]: `teeth` periods,
/// each rising with slope v + amplitude then v - amplitude (v = (end - start)/t).
/// `intervals` must be a multiple of 2 teeth so kinks fall on samples.
SampledCurve zigzag_curve(const Vec& start, const Vec& end, double t, int teeth, double amplitude,
                          int intervals);

/// Cubic B-spline curves through uniformly spaced waypoints: the endpoints
/// match the problem (a random start for Bolza problems) and interior
/// waypoints are the straight line plus uniform noise in [-amplitude, amplitude].
std::vector<SampledCurve> comparison_family(const Problem& problem, int count, int waypoints,
                                            double amplitude, int samples, std::uint64_t seed);

}  // namespace varmin
