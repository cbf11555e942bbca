#include "varmin/analysis.hpp"
#include "varmin/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace varmin {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::exact:
      return "exact";
    case Verdict::first_order:
      return "first_order";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

namespace {

void check_study_args(int K0, int levels) {
  if (K0 < 2) throw ContractError("refine_study: K0 must be >= 2");
  if (levels < 2) throw ContractError("refine_study: levels must be >= 2");
  if (levels > 24 || static_cast<long long>(K0) << (levels - 1) > (1LL << 26)) {
    throw ContractError("refine_study: finest grid too large");
  }
}

// Merges a backward and a forward flow sharing the anchor sample.
FlowCurves merge(FlowCurves backward, const FlowCurves& forward) {
  auto append = [](SampledCurve& into, const SampledCurve& from) {
    into.s.insert(into.s.end(), from.s.begin() + 1, from.s.end());
    into.y.insert(into.y.end(), from.y.begin() + 1, from.y.end());
    into.dy.insert(into.dy.end(), from.dy.begin() + 1, from.dy.end());
  };
  append(backward.position, forward.position);
  append(backward.momentum, forward.momentum);
  return backward;
}

}  // namespace

std::vector<SolveResult> solve_levels(const Problem& problem, int K0, int levels,
                                      const StudyOptions& opts) {
  check_study_args(K0, levels);
  const InitStrategy init = opts.init.value_or(InitStrategy::straight_line);
  std::vector<std::optional<SolveResult>> slots(levels);
  parallel_for(
      static_cast<std::size_t>(levels),
      [&](std::size_t j) {
        const int K = K0 << j;
        slots[j] = minimize_discrete(problem, K, initial_guess(problem, K, init), opts.solve);
      },
      opts.threads);
  std::vector<SolveResult> out;
  out.reserve(levels);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ConvergenceReport refine_study(const Problem& problem, int K0, int levels, const StudyOptions& opts) {
  check_study_args(K0, levels);
  std::vector<SolveResult> solved = solve_levels(problem, K0, levels, opts);

  ConvergenceReport report;
  // Keep the levels before the first non-converged one.
  std::size_t good = 0;
  while (good < solved.size() && solved[good].converged) ++good;
  if (good < solved.size()) {
    report.truncated = true;
    report.note = "level K=" + std::to_string(solved[good].path.K()) + " did not converge";
    solved.erase(solved.begin() + static_cast<std::ptrdiff_t>(good), solved.end());
  }

  std::vector<PhasePolygon> polygons;
  for (const SolveResult& r : solved) {
    polygons.push_back(polygonal_interpolant(r.path, r.momenta));
    LevelRecord rec;
    rec.K = r.path.K();
    rec.h = r.path.grid().h();
    rec.action = r.action;
    rec.grad_norm = r.grad_norm;
    rec.iterations = r.iterations;
    rec.converged = r.converged;
    rec.hamilton_residual = discrete_hamilton_residual(problem.model(), r.path, r.momenta);
    rec.el_residual = polygons.back().grid().K() >= 3 ? el_residual(problem.model(), polygons.back().node_curve()) : 0.0;
    rec.polygon_action = polygon_action(problem, polygons.back());
    report.levels.push_back(rec);
  }

  if (!polygons.empty()) {
    const int n_probe = opts.n_probe > 0 ? opts.n_probe : 4 * polygons.back().grid().K();
    for (std::size_t j = 0; j + 1 < polygons.size(); ++j) {
      report.levels[j].distance_to_next = polygon_distance(polygons[j], polygons[j + 1], n_probe);
    }
    for (std::size_t j = 0; j + 2 < polygons.size(); ++j) {
      report.observed_orders.push_back(
          std::log2(*report.levels[j].distance_to_next / *report.levels[j + 1].distance_to_next));
    }
    for (std::size_t j = 0; j + 1 < report.levels.size(); ++j) {
      report.el_orders.push_back(std::log2(report.levels[j].el_residual / report.levels[j + 1].el_residual));
    }

    if (opts.oracle) {
      // Launch the exact flow from the finest level's minimal-velocity node.
      const SolveResult& finest = solved.back();
      const int K = finest.path.K();
      const int ks = finest.certificate.k_star;
      const double ts = finest.path.grid().node(ks);
      report.anchor_k = ks;
      report.anchor_t = ts;
      const Vec& y = finest.path.node(ks);
      const Vec& z = finest.momenta.z[ks];
      const int sub = std::max(1, opts.oracle_substeps);
      FlowCurves forward = reference_flow(problem.model(), y, z, ts, problem.horizon(),
                                          std::max(1, sub * (K - ks)));
      FlowCurves flow = forward;
      if (ks > 0) flow = merge(reference_flow(problem.model(), y, z, ts, 0.0, sub * ks), forward);
      for (std::size_t j = 0; j < polygons.size(); ++j) {
        report.levels[j].distance_to_oracle = polygon_flow_distance(polygons[j], flow.position, flow.momentum);
      }
    }
  }

  if (report.truncated || report.levels.size() < 2) {
    report.verdict = Verdict::inconclusive;
  } else {
    const bool exact = std::all_of(report.levels.begin(), report.levels.end() - 1, [&](const LevelRecord& r) {
      return *r.distance_to_next <= opts.exact_tol;
    });
    const bool first_order =
        !report.observed_orders.empty() &&
        std::all_of(report.observed_orders.begin(), report.observed_orders.end(),
                    [&](double o) { return o >= opts.order_lo && o <= opts.order_hi; });
    report.verdict = exact ? Verdict::exact : first_order ? Verdict::first_order : Verdict::inconclusive;
  }
  return report;
}

}  // namespace varmin
