#include "varmin/analysis.hpp"
#include "varmin/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace varmin {

namespace {

struct Rhs {
  Vec dx;  // dH/dp
  Vec dp;  // -dH/dx
  Vec xi;
};

Rhs hamilton_rhs(const LagrangianModel& model, const Vec& x, double s, const Vec& p,
                 const Vec& warm) {
  if (!x.allFinite() || !p.allFinite()) {
    std::ostringstream os;
    os << "reference_flow: state left every bounded set at s=" << s;
    throw CompletenessError(os.str());
  }
  try {
    const ConjugateResult c = conjugate_velocity(model, x, s, p, warm);
    return {c.dH_dp, -c.dH_dx, c.xi};
  } catch (const ModelEvaluationError& e) {
    throw CompletenessError(std::string("reference_flow: ") + e.what());
  }
}

}  // namespace

FlowCurves reference_flow(const LagrangianModel& model, const Vec& x0, const Vec& p0, double t0,
                          double t1, int steps) {
  if (steps < 1) throw ContractError("reference_flow: steps must be >= 1");
  if (x0.size() != model.dim() || p0.size() != model.dim()) {
    throw ContractError("reference_flow: initial state dimension mismatch");
  }
  const double step = (t1 - t0) / steps;

  FlowCurves out;
  Vec x = x0;
  Vec p = p0;
  Vec warm = p0;
  auto record = [&](double s, const Rhs& f) {
    out.position.s.push_back(s);
    out.position.y.push_back(x);
    out.position.dy.push_back(f.dx);
    out.momentum.s.push_back(s);
    out.momentum.y.push_back(p);
    out.momentum.dy.push_back(f.dp);
  };

  Rhs k1 = hamilton_rhs(model, x, t0, p, warm);
  record(t0, k1);
  for (int i = 0; i < steps; ++i) {
    const double s = t0 + step * i;
    const double half = s + 0.5 * step;
    const Rhs k2 = hamilton_rhs(model, x + 0.5 * step * k1.dx, half, p + 0.5 * step * k1.dp, k1.xi);
    const Rhs k3 = hamilton_rhs(model, x + 0.5 * step * k2.dx, half, p + 0.5 * step * k2.dp, k2.xi);
    const double next = i + 1 == steps ? t1 : t0 + step * (i + 1);
    const Rhs k4 = hamilton_rhs(model, x + step * k3.dx, next, p + step * k3.dp, k3.xi);
    x += step / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    p += step / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    k1 = hamilton_rhs(model, x, next, p, k4.xi);
    record(next, k1);
  }

  if (t1 < t0) {
    for (SampledCurve* c : {&out.position, &out.momentum}) {
      std::reverse(c->s.begin(), c->s.end());
      std::reverse(c->y.begin(), c->y.end());
      std::reverse(c->dy.begin(), c->dy.end());
    }
  }
  return out;
}

}  // namespace varmin
