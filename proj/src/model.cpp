#include "varmin/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace varmin {

std::string format_point(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

std::string where(const Vec& x, double t, const Vec& xi) {
  std::ostringstream os;
  os.precision(17);
  os << "x=" << format_point(x) << " t=" << t << " xi=" << format_point(xi);
  return os.str();
}

Vec fd_step(const Vec& at, Eigen::Index i) {
  Vec e = Vec::Zero(at.size());
  e[i] = 1e-6 * (1.0 + std::abs(at[i]));
  return e;
}

}  // namespace

LagrangianModel::LagrangianModel(std::string name, int dim, EvalFn eval)
    : name_(std::move(name)), dim_(dim), eval_(std::move(eval)) {
  if (dim_ < 1) throw ModelDefinitionError("model '" + name_ + "': dimension must be >= 1");
  if (!eval_) throw ModelDefinitionError("model '" + name_ + "': missing evaluator");
}

LagrangianModel& LagrangianModel::with_params(Params params) {
  params_ = std::move(params);
  return *this;
}

LagrangianModel& LagrangianModel::with_second_derivatives(SecondFn second) {
  second_ = std::move(second);
  return *this;
}

LagrangianModel& LagrangianModel::with_superlinearity(BoundFn bound, ScalarFn part) {
  bound_ = std::move(bound);
  part_ = std::move(part);
  return *this;
}

LagrangianModel& LagrangianModel::with_hessian_floor(double floor) {
  hessian_floor_ = floor;
  return *this;
}

LagrangianEval LagrangianModel::eval(const Vec& x, double t, const Vec& xi) const {
  if (x.size() != dim_ || xi.size() != dim_) {
    throw ModelDefinitionError("model '" + name_ + "': argument dimension mismatch");
  }
  if (!all_finite(x) || !all_finite(xi) || !std::isfinite(t)) {
    throw ModelEvaluationError("model '" + name_ + "': non-finite input at " + where(x, t, xi));
  }
  LagrangianEval e = eval_(x, t, xi);
  if (e.dx.size() != dim_ || e.dxi.size() != dim_ || e.hess_xi.rows() != dim_ ||
      e.hess_xi.cols() != dim_) {
    throw ModelDefinitionError("model '" + name_ + "': evaluator returned wrong shapes");
  }
  if (!std::isfinite(e.value) || !all_finite(e.dx) || !all_finite(e.dxi) ||
      !e.hess_xi.allFinite()) {
    throw ModelEvaluationError("model '" + name_ + "': non-finite output at " + where(x, t, xi));
  }
  return e;
}

SecondDerivatives LagrangianModel::second_derivatives(const Vec& x, double t, const Vec& xi) const {
  if (second_) return second_(x, t, xi);
  const int d = dim_;
  SecondDerivatives s{Mat(d, d), Mat(d, d), eval(x, t, xi).hess_xi};
  for (int j = 0; j < d; ++j) {
    const Vec e = fd_step(x, j);
    const LagrangianEval plus = eval(x + e, t, xi);
    const LagrangianEval minus = eval(x - e, t, xi);
    // column j: derivative w.r.t. x_j
    s.xx.col(j) = (plus.dx - minus.dx) / (2.0 * e[j]);
    // d(dL/dxi_i)/dx_j = xxi(j, i)
    s.xxi.row(j) = ((plus.dxi - minus.dxi) / (2.0 * e[j])).transpose();
  }
  s.xx = 0.5 * (s.xx + s.xx.transpose()).eval();
  return s;
}

std::optional<double> LagrangianModel::superlinearity(double a) const {
  if (!bound_) return std::nullopt;
  return bound_(a);
}

double LagrangianModel::superlinear_part(const Vec& x, double t, const Vec& xi) const {
  if (part_) return part_(x, t, xi);
  return eval(x, t, xi).value;
}

// --- terminal cost ------------------------------------------------------------

TerminalCost::TerminalCost(std::string name, ValueFn value, GradFn grad, double alpha, double beta,
                           HessFn hess)
    : name_(std::move(name)),
      value_(std::move(value)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      alpha_(alpha),
      beta_(beta) {
  if (!value_ || !grad_) throw ModelDefinitionError("terminal cost '" + name_ + "' needs a gradient");
  if (!(alpha_ >= 0.0)) throw ModelDefinitionError("terminal cost alpha must be >= 0");
}

TerminalCost TerminalCost::zero(int dim) {
  return TerminalCost(
      "zero", [](const Vec&) { return 0.0; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
      0.0, 0.0, [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
}

TerminalCost TerminalCost::quadratic(double weight, Vec center) {
  if (!(weight >= 0.0)) throw ModelDefinitionError("quadratic terminal cost needs weight >= 0");
  const auto d = center.size();
  TerminalCost w(
      "quadratic",
      [weight, center](const Vec& x) { return 0.5 * weight * (x - center).squaredNorm(); },
      [weight, center](const Vec& x) { return Vec(weight * (x - center)); }, 0.0, 0.0,
      [weight, d](const Vec&) { return Mat(weight * Mat::Identity(d, d)); });
  w.params_ = {{"weight", weight}};
  return w;
}

TerminalCost TerminalCost::linear(Vec slope) {
  const double alpha = slope.norm();
  const auto d = slope.size();
  return TerminalCost(
      "linear", [slope](const Vec& x) { return slope.dot(x); },
      [slope](const Vec&) { return slope; }, alpha, 0.0,
      [d](const Vec&) { return Mat(Mat::Zero(d, d)); });
}

TerminalCost& TerminalCost::with_params(Params params) {
  params_ = std::move(params);
  return *this;
}

double TerminalCost::value(const Vec& x) const {
  const double v = value_(x);
  if (!std::isfinite(v)) {
    throw ModelEvaluationError("terminal cost '" + name_ + "': non-finite value at " + format_point(x));
  }
  return v;
}

Vec TerminalCost::gradient(const Vec& x) const {
  Vec g = grad_(x);
  if (g.size() != x.size() || !g.allFinite()) {
    throw ModelEvaluationError("terminal cost '" + name_ + "': bad gradient at " + format_point(x));
  }
  return g;
}

Mat TerminalCost::hessian(const Vec& x) const {
  if (hess_) return hess_(x);
  const auto d = x.size();
  Mat h(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Vec e = fd_step(x, j);
    h.col(j) = (gradient(x + e) - gradient(x - e)) / (2.0 * e[j]);
  }
  return 0.5 * (h + h.transpose());
}

// --- catalog ------------------------------------------------------------------

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"free_particle", "harmonic_oscillator",
                                              "anisotropic_quadratic", "mechanical"};
  return names;
}

namespace {

double param_or(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& model, const Params& p,
                    const std::function<bool(const std::string&)>& known) {
  for (const auto& [key, value] : p) {
    if (!known(key)) throw LookupError("model '" + model + "': unknown parameter '" + key + "'");
    if (!std::isfinite(value)) {
      throw LookupError("model '" + model + "': parameter '" + key + "' is not finite");
    }
  }
}

double kinetic(const Vec& xi) { return 0.5 * xi.squaredNorm(); }

LagrangianModel free_particle(int dim) {
  LagrangianModel m("free_particle", dim, [dim](const Vec&, double, const Vec& xi) {
    return LagrangianEval{kinetic(xi), Vec::Zero(dim), xi, Mat::Identity(dim, dim)};
  });
  m.with_second_derivatives([dim](const Vec&, double, const Vec&) {
     return SecondDerivatives{Mat::Zero(dim, dim), Mat::Zero(dim, dim), Mat::Identity(dim, dim)};
   })
      .with_superlinearity([](double a) { return -0.5 * a * a; })
      .with_hessian_floor(1.0);
  return m;
}

LagrangianModel harmonic_oscillator(int dim, double omega) {
  const double w2 = omega * omega;
  LagrangianModel m("harmonic_oscillator", dim, [dim, w2](const Vec& x, double, const Vec& xi) {
    return LagrangianEval{kinetic(xi) - 0.5 * w2 * x.squaredNorm(), -w2 * x, xi,
                          Mat::Identity(dim, dim)};
  });
  // b_a is declared against the kinetic part; the potential is unbounded below.
  m.with_second_derivatives([dim, w2](const Vec&, double, const Vec&) {
     return SecondDerivatives{-w2 * Mat::Identity(dim, dim), Mat::Zero(dim, dim),
                              Mat::Identity(dim, dim)};
   })
      .with_superlinearity([](double a) { return -0.5 * a * a; },
                           [](const Vec&, double, const Vec& xi) { return kinetic(xi); })
      .with_params({{"omega", omega}})
      .with_hessian_floor(1.0);
  return m;
}

LagrangianModel anisotropic_quadratic(int dim, const Params& params) {
  Vec mass = Vec::Constant(dim, param_or(params, "mass", 1.0));
  for (int i = 0; i < dim; ++i) mass[i] = param_or(params, "mass" + std::to_string(i), mass[i]);
  if ((mass.array() <= 0.0).any()) {
    throw ModelDefinitionError("anisotropic_quadratic: masses must be positive");
  }
  const double m_min = mass.minCoeff();
  const Mat hess = mass.asDiagonal();
  LagrangianModel m("anisotropic_quadratic", dim, [dim, mass, hess](const Vec&, double, const Vec& xi) {
    const Vec p = mass.cwiseProduct(xi);
    return LagrangianEval{0.5 * xi.dot(p), Vec::Zero(dim), p, hess};
  });
  Params recorded{{"mass", param_or(params, "mass", 1.0)}};
  for (int i = 0; i < dim; ++i) {
    if (params.count("mass" + std::to_string(i))) recorded["mass" + std::to_string(i)] = mass[i];
  }
  // m|xi|^2/2 >= a|xi| - a^2/(2m)
  m.with_second_derivatives([dim, hess](const Vec&, double, const Vec&) {
     return SecondDerivatives{Mat::Zero(dim, dim), Mat::Zero(dim, dim), hess};
   })
      .with_superlinearity([m_min](double a) { return -0.5 * a * a / m_min; })
      .with_params(std::move(recorded))
      .with_hessian_floor(m_min);
  return m;
}

LagrangianModel mechanical(int dim, double amplitude, double wavenumber) {
  const double sup_v = std::abs(amplitude) * dim;
  LagrangianModel m("mechanical", dim,
                    [dim, amplitude, wavenumber](const Vec& x, double, const Vec& xi) {
                      const Eigen::ArrayXd kx = wavenumber * x.array();
                      const double v = amplitude * kx.cos().sum();
                      // L = |xi|^2/2 - V, V = A sum cos(k x_i)
                      Vec dx = (amplitude * wavenumber * kx.sin()).matrix();
                      return LagrangianEval{kinetic(xi) - v, dx, xi, Mat::Identity(dim, dim)};
                    });
  m.with_second_derivatives([dim, amplitude, wavenumber](const Vec& x, double, const Vec&) {
     const Eigen::ArrayXd kx = wavenumber * x.array();
     const Vec diag = (amplitude * wavenumber * wavenumber * kx.cos()).matrix();
     return SecondDerivatives{diag.asDiagonal(), Mat::Zero(dim, dim), Mat::Identity(dim, dim)};
   })
      .with_superlinearity([sup_v](double a) { return -0.5 * a * a - sup_v; })
      .with_params({{"amplitude", amplitude}, {"wavenumber", wavenumber}})
      .with_hessian_floor(1.0);
  return m;
}

std::string catalog_listing() {
  std::string s;
  for (const auto& n : catalog_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

LagrangianModel catalog_lookup(const std::string& name, const Params& params, int dim) {
  if (dim < 1) throw ModelDefinitionError("catalog model '" + name + "': dim must be >= 1");
  if (name == "free_particle") {
    reject_unknown(name, params, [](const std::string&) { return false; });
    return free_particle(dim);
  }
  if (name == "harmonic_oscillator") {
    reject_unknown(name, params, [](const std::string& k) { return k == "omega"; });
    return harmonic_oscillator(dim, param_or(params, "omega", 1.0));
  }
  if (name == "anisotropic_quadratic") {
    reject_unknown(name, params, [dim](const std::string& k) {
      if (k == "mass") return true;
      for (int i = 0; i < dim; ++i) {
        if (k == "mass" + std::to_string(i)) return true;
      }
      return false;
    });
    return anisotropic_quadratic(dim, params);
  }
  if (name == "mechanical") {
    reject_unknown(name, params,
                   [](const std::string& k) { return k == "amplitude" || k == "wavenumber"; });
    return mechanical(dim, param_or(params, "amplitude", 1.0), param_or(params, "wavenumber", 1.0));
  }
  throw LookupError("unknown model '" + name + "'; catalog: " + catalog_listing());
}

LagrangianModel make_quadratic_model(std::string name, Mat mass, Mat stiffness) {
  const auto d = mass.rows();
  if (d < 1 || mass.cols() != d || stiffness.rows() != d || stiffness.cols() != d) {
    throw ModelDefinitionError("quadratic model '" + name + "': matrices must be square and equal size");
  }
  LagrangianModel m(std::move(name), static_cast<int>(d),
                    [mass, stiffness](const Vec& x, double, const Vec& xi) {
                      const Vec p = mass * xi;
                      const Vec sx = stiffness * x;
                      return LagrangianEval{0.5 * xi.dot(p) - 0.5 * x.dot(sx), -sx, p, mass};
                    });
  m.with_second_derivatives([mass, stiffness, d](const Vec&, double, const Vec&) {
    return SecondDerivatives{-stiffness, Mat::Zero(d, d), mass};
  });
  return m;
}

// --- condition checks ---------------------------------------------------------

SampleBox SampleBox::cube(int dim, double lo, double hi) {
  return SampleBox{std::vector<Interval>(dim, {lo, hi}), {lo, hi},
                   std::vector<Interval>(dim, {lo, hi})};
}

SamplePoint draw_sample(const SampleBox& box, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](const Interval& iv) { return iv.lo + (iv.hi - iv.lo) * unit(rng); };
  SamplePoint s{Vec(box.x.size()), 0.0, Vec(box.xi.size())};
  for (std::size_t i = 0; i < box.x.size(); ++i) s.x[i] = pick(box.x[i]);
  s.t = pick(box.t);
  for (std::size_t i = 0; i < box.xi.size(); ++i) s.xi[i] = pick(box.xi[i]);
  return s;
}

bool ConditionReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck* ConditionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

void validate_box(const SampleBox& box, int dim) {
  auto ok = [](const Interval& iv) { return std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi; };
  if (static_cast<int>(box.x.size()) != dim || static_cast<int>(box.xi.size()) != dim) {
    throw ContractError("sample box dimension does not match the model");
  }
  if (!ok(box.t) || !std::all_of(box.x.begin(), box.x.end(), ok) ||
      !std::all_of(box.xi.begin(), box.xi.end(), ok)) {
    throw ContractError("sample box is degenerate");
  }
}

}  // namespace

double estimate_superlinearity(const LagrangianModel& model, const SampleBox& box, int n_samples,
                               double a, std::uint64_t seed) {
  if (n_samples < 1) throw ContractError("n_samples must be >= 1");
  validate_box(box, model.dim());
  double b = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const SamplePoint s = draw_sample(box, seed, i);
    b = std::min(b, model.superlinear_part(s.x, s.t, s.xi) - a * s.xi.norm());
  }
  return b;
}

ConditionReport check_conditions(const LagrangianModel& model, const TerminalCost* w,
                                 const SampleBox& box, int n_samples,
                                 const ConditionOptions& opts) {
  if (n_samples < 1) throw ContractError("n_samples must be >= 1");
  validate_box(box, model.dim());

  ConditionReport report;
  report.superlinearity_approximate = !model.has_exact_superlinearity();
  for (double a : opts.a_values) {
    report.b_values[a] = model.has_exact_superlinearity()
                             ? *model.superlinearity(a)
                             : estimate_superlinearity(model, box, n_samples, a, opts.seed);
  }

  ConditionCheck pd{"positive_definite", true, 0.0, std::numeric_limits<double>::infinity(), {}};
  ConditionCheck sl{"superlinearity", true, 0.0, std::numeric_limits<double>::infinity(), {}};
  ConditionCheck tc{"terminal_growth", true, 0.0, std::numeric_limits<double>::infinity(), {}};

  for (int i = 0; i < n_samples; ++i) {
    const SamplePoint s = draw_sample(box, opts.seed, i);
    const LagrangianEval e = model.eval(s.x, s.t, s.xi);
    const double asym = (e.hess_xi - e.hess_xi.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
      throw ModelDefinitionError("model '" + model.name() + "': velocity Hessian not symmetric at xi=" +
                                 format_point(s.xi));
    }
    const double lambda = Eigen::SelfAdjointEigenSolver<Mat>(e.hess_xi, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
    if (lambda < pd.extreme) {
      pd.extreme = lambda;
      pd.witness = s;
    }
    const double part = model.superlinear_part(s.x, s.t, s.xi);
    for (const auto& [a, b] : report.b_values) {
      const double slack = part - a * s.xi.norm() - b;
      if (slack < sl.extreme) {
        sl.extreme = slack;
        sl.witness = s;
      }
    }
    if (w) {
      const double slack = w->value(s.x) + w->alpha() * s.x.norm() - w->beta();
      if (slack < tc.extreme) {
        tc.extreme = slack;
        tc.witness = s;
      }
    }
  }

  pd.pass = pd.extreme > 0.0;
  pd.worst_violation = pd.pass ? 0.0 : std::max(0.0, -pd.extreme);
  sl.pass = sl.extreme >= -opts.slack_tolerance;
  sl.worst_violation = sl.pass ? 0.0 : -sl.extreme;
  report.min_hessian_eigenvalue = pd.extreme;
  report.worst_superlinearity_slack = sl.extreme;
  report.checks.push_back(pd);
  report.checks.push_back(sl);
  if (w) {
    tc.pass = tc.extreme >= -opts.slack_tolerance;
    tc.worst_violation = tc.pass ? 0.0 : -tc.extreme;
    report.worst_terminal_slack = tc.extreme;
    report.checks.push_back(tc);
  }
  return report;
}

}  // namespace varmin
