#pragma once

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/general_solver.hpp"

namespace apc {

/// Absolute slack on the 0 <= f(r) <= r feasibility check, absorbing rounding
/// in the cancellation near r = 0.
inline constexpr double kFeasibilityTol = 1e-12;

inline bool is_feasible(double r, double bid) { return bid >= -kFeasibilityTol && bid <= r + kFeasibilityTol; }

/// Bids of both countries at private value r under `sol`.
inline StrategyValue evaluate_strategy(const ConflictRatios& p, const EquilibriumSolution& sol, double r) {
  if (sol.method == SolveMethod::ClosedFormEqual) return eval_equal_strategy(r, p.beta, p.alpha);
  return eval_general_strategy(r, sol, p);
}

/// Callable view of one solution, suitable for the oracle and simulator.
class StrategyPair {
public:
  StrategyPair(ConflictRatios params, EquilibriumSolution sol) : params_(params), sol_(sol) {}

  StrategyValue operator()(double r) const { return evaluate_strategy(params_, sol_, r); }

  const ConflictRatios& params() const { return params_; }
  const EquilibriumSolution& solution() const { return sol_; }

private:
  ConflictRatios params_;
  EquilibriumSolution sol_;
};

}  // namespace apc
