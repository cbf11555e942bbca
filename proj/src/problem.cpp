#include "varmin/problem.hpp"

#include <cmath>

namespace varmin {

namespace {

void check_endpoint(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) {
    throw ContractError(std::string("problem: ") + what + " has dimension " +
                        std::to_string(v.size()) + ", model has " + std::to_string(dim));
  }
  if (!v.allFinite()) throw ContractError(std::string("problem: ") + what + " is not finite");
}

}  // namespace

Problem::Problem(LagrangianModel model, double horizon, Kind kind)
    : model_(std::move(model)), horizon_(horizon), kind_(std::move(kind)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ContractError("problem: horizon must be positive and finite");
  }
}

Problem Problem::two_point(LagrangianModel model, double horizon, Vec start, Vec end) {
  check_endpoint(start, model.dim(), "start");
  check_endpoint(end, model.dim(), "end");
  return Problem(std::move(model), horizon, TwoPoint{std::move(start), std::move(end)});
}

Problem Problem::bolza(LagrangianModel model, double horizon, Vec end, TerminalCost w) {
  check_endpoint(end, model.dim(), "end");
  return Problem(std::move(model), horizon, Bolza{std::move(end), std::move(w)});
}

const Vec& Problem::end() const {
  return std::visit([](const auto& k) -> const Vec& { return k.end; }, kind_);
}

const Vec& Problem::start() const {
  if (const auto* tp = std::get_if<TwoPoint>(&kind_)) return tp->start;
  throw ContractError("problem: Bolza problems have no fixed start point");
}

const TerminalCost& Problem::terminal_cost() const {
  if (const auto* b = std::get_if<Bolza>(&kind_)) return b->w;
  throw ContractError("problem: two-point problems have no terminal cost");
}

}  // namespace varmin
