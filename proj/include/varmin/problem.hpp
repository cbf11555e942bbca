#pragma once

#include "varmin/model.hpp"

#include <optional>
#include <variant>

namespace varmin {

/// Both endpoints fixed: gamma(0) = start, gamma(t) = end.
struct TwoPoint {
  Vec start;
  Vec end;
};

/// Free left endpoint penalized by w, gamma(t) = end.
struct Bolza {
  Vec end;
  TerminalCost w;
};

/// A minimization problem over curves on [0, horizon].
class Problem {
 public:
  static Problem two_point(LagrangianModel model, double horizon, Vec start, Vec end);
  static Problem bolza(LagrangianModel model, double horizon, Vec end, TerminalCost w);

  const LagrangianModel& model() const noexcept { return model_; }
  double horizon() const noexcept { return horizon_; }
  int dim() const noexcept { return model_.dim(); }

  bool is_bolza() const noexcept { return std::holds_alternative<Bolza>(kind_); }
  bool is_two_point() const noexcept { return std::holds_alternative<TwoPoint>(kind_); }

  /// Fixed node gamma(t).
  const Vec& end() const;
  /// Fixed node gamma(0); two-point problems only.
  const Vec& start() const;
  /// Terminal cost; Bolza problems only.
  const TerminalCost& terminal_cost() const;

 private:
  using Kind = std::variant<TwoPoint, Bolza>;
  Problem(LagrangianModel model, double horizon, Kind kind);

  LagrangianModel model_;
  double horizon_;
  Kind kind_;
};

}  // namespace varmin
