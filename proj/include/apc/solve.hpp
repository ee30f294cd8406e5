#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"
#include "apc/general_solver.hpp"
#include "apc/oracle.hpp"

namespace apc {

enum class SolverChoice { Auto, Equal, Order0, Order1, Order2, Converge, Root };

inline SolverChoice parse_solver_choice(const std::string& s) {
  if (s == "auto") return SolverChoice::Auto;
  if (s == "equal") return SolverChoice::Equal;
  if (s == "order0") return SolverChoice::Order0;
  if (s == "order1") return SolverChoice::Order1;
  if (s == "order2") return SolverChoice::Order2;
  if (s == "converge") return SolverChoice::Converge;
  if (s == "root") return SolverChoice::Root;
  throw DomainError("unknown method '" + s + "'");
}

inline std::string to_string(SolverChoice c) {
  switch (c) {
    case SolverChoice::Auto: return "auto";
    case SolverChoice::Equal: return "equal";
    case SolverChoice::Order0: return "order0";
    case SolverChoice::Order1: return "order1";
    case SolverChoice::Order2: return "order2";
    case SolverChoice::Converge: return "converge";
    case SolverChoice::Root: return "root";
  }
  return "unknown";
}

/// Auto picks the closed form when lambda == beta and the second-order
/// iterate otherwise.
inline SolverChoice resolve_choice(const ConflictRatios& p, SolverChoice c) {
  if (c != SolverChoice::Auto) return c;
  return is_equal_case(p) ? SolverChoice::Equal : SolverChoice::Order2;
}

/// K1, K2 from the exact conditions f1(0) = f2(0) = 0.
inline EquilibriumSolution origin_pinned_solution(double k0, double lambda, double beta, double alpha) {
  EquilibriumSolution sol{k0, 0.0, 0.0, SolveMethod::RootFound, std::nullopt};
  if (alpha == 0.0) return sol;
  const double p = beta / lambda;
  const double q = lambda / beta;
  const double om = 1.0 - alpha;
  const double off1 = alpha * (beta * lambda + beta + 2.0 * lambda) / ((beta + lambda) * (beta + 2.0 * lambda) * om);
  const double off2 = alpha * beta * lambda * (1.0 + 2.0 * beta + lambda) / ((beta + lambda) * (2.0 * beta + lambda) * om);
  sol.k1 = std::pow(alpha, 1.0 + p) * (off1 - k0 * std::pow(alpha, p) / ((lambda + 2.0 * beta) * om));
  sol.k2 = std::pow(alpha, 1.0 + q) *
           (off2 - lambda * beta * std::pow(k0, -q) * std::pow(alpha, q) / ((2.0 * lambda + beta) * om));
  return sol;
}

struct SolveResult {
  EquilibriumSolution solution;
  SolverDiagnostics diagnostics;
  SolverChoice choice = SolverChoice::Auto;
};

/// Runs the selected solver. Left-boundary residuals are measured where the
/// method imposes its boundary condition: r = 0 for the closed form and the
/// root-found K0, r = eps for the iterated solutions.
inline SolveResult solve(const ConflictRatios& p, SolverChoice choice, ConvergeOptions converge = {}) {
  validate(p);
  SolveResult out;
  out.choice = resolve_choice(p, choice);

  switch (out.choice) {
    case SolverChoice::Equal: {
      detail::require(is_equal_case(p), "the closed-form solver requires lambda == beta");
      out.solution = solve_equal(p.beta, p.alpha);
      const auto left = eval_equal_strategy(0.0, p.beta, p.alpha);
      const auto right = eval_equal_strategy(1.0, p.beta, p.alpha);
      out.diagnostics.residual_bc_left1 = std::abs(left.f1);
      out.diagnostics.residual_bc_left2 = std::abs(left.f2);
      out.diagnostics.residual_bc_right = std::abs(right.f1 - right.f2 / p.lambda);
      out.diagnostics.fixed_point_residual =
          std::abs(boundary_residual(boundary_coefficients(p.lambda, p.beta, p.alpha), 1.0, p.lambda, p.beta));
      break;
    }
    case SolverChoice::Root: {
      const double k0 = solve_k0_root(p);
      out.solution = origin_pinned_solution(k0, p.lambda, p.beta, p.alpha);
      const auto left = eval_response_family(0.0, k0, out.solution.k1, out.solution.k2, p.lambda, p.beta, p.alpha);
      const auto right = eval_response_family(1.0, k0, out.solution.k1, out.solution.k2, p.lambda, p.beta, p.alpha);
      out.diagnostics.k0_trace = {1.0, k0};
      out.diagnostics.residual_bc_left1 = std::abs(left.f1);
      out.diagnostics.residual_bc_left2 = std::abs(left.f2);
      out.diagnostics.residual_bc_right = std::abs(right.f1 - right.f2 / p.lambda);
      out.diagnostics.fixed_point_residual =
          std::abs(boundary_residual(boundary_coefficients(p.lambda, p.beta, p.alpha), k0, p.lambda, p.beta));
      break;
    }
    default: {
      IterationMode mode = out.choice == SolverChoice::Order0   ? IterationMode::order(0)
                           : out.choice == SolverChoice::Order1 ? IterationMode::order(1)
                           : out.choice == SolverChoice::Order2 ? IterationMode::order(2)
                                                                : IterationMode::until_converged(converge);
      auto r = iterate_k0(p, mode);
      out.solution = r.solution;
      out.diagnostics = std::move(r.diagnostics);
      break;
    }
  }
  return out;
}

}  // namespace apc
