#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "apc/core_model.hpp"
#include "apc/errors.hpp"
#include "apc/general_solver.hpp"
#include "apc/oracle.hpp"
#include "apc/solve.hpp"

namespace apc {

struct VerifyOptions {
  std::size_t grid_size = kDefaultGridSize;
  std::vector<double> probe_points{0.25, 0.5, 0.75};
  double best_response_tol_equal = 1e-3;
  double best_response_tol_general = 5e-3;
  double ode_tol = 1e-6;
};

struct BestResponseProbe {
  double r1 = 0.0;
  double best_response = 0.0;
  double strategy = 0.0;
  double gap = 0.0;
};

/// Oracle cross-check of one solution: best responses against the sampled
/// country-2 strategy, ODE residuals, and K0 against the exact r = 0 root
/// (and the converged regularized fixed point when lambda != beta).
struct VerificationReport {
  ConflictRatios params;
  EquilibriumSolution solution;
  std::vector<BestResponseProbe> probes;
  double max_best_response_gap = 0.0;
  double best_response_tol = 0.0;
  OdeResidual ode;
  double ode_tol = 0.0;
  double k0_root = 0.0;
  std::optional<double> k0_converged;
  bool passed = false;
};

inline VerificationReport verify(const ConflictRatios& params, const EquilibriumSolution& sol,
                                 const VerifyOptions& opts = {}) {
  VerificationReport rep;
  rep.params = params;
  rep.solution = sol;
  const auto table = make_strategy_table(params, sol, opts.grid_size);
  const StrategyPair strategy(params, sol);

  rep.best_response_tol =
      sol.method == SolveMethod::ClosedFormEqual ? opts.best_response_tol_equal : opts.best_response_tol_general;
  const auto payoff = detail::table_payoff(table);
  for (double r1 : opts.probe_points) {
    const double r = std::clamp(r1, params.epsilon, 1.0);
    BestResponseProbe probe;
    probe.r1 = r;
    probe.best_response = best_response(payoff, r);
    probe.strategy = strategy(r).f1;
    probe.gap = std::abs(probe.best_response - probe.strategy);
    rep.max_best_response_gap = std::max(rep.max_best_response_gap, probe.gap);
    rep.probes.push_back(probe);
  }

  rep.ode = ode_residual(table);
  rep.ode_tol = opts.ode_tol;
  rep.k0_root = solve_k0_root(params);
  if (!is_equal_case(params) && params.alpha >= kGeneralAlphaMin) {
    try {
      rep.k0_converged = iterate_k0(params, IterationMode::until_converged()).solution.k0;
    } catch (const DivergenceError&) {
      rep.k0_converged.reset();
    }
  }
  rep.passed = rep.max_best_response_gap <= rep.best_response_tol && rep.ode.res1 <= rep.ode_tol &&
               rep.ode.res2 <= rep.ode_tol;
  return rep;
}

}  // namespace apc
