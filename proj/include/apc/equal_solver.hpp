#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "apc/core_model.hpp"
#include "apc/errors.hpp"

namespace apc {

enum class SolveMethod { ClosedFormEqual, IteratedGeneral, RootFound };

inline std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::ClosedFormEqual: return "closed_form_equal";
    case SolveMethod::IteratedGeneral: return "iterated_general";
    case SolveMethod::RootFound: return "root_found";
  }
  return "unknown";
}

/// Integration constants pinning one member of the best-response family.
struct EquilibriumSolution {
  double k0 = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
  SolveMethod method = SolveMethod::ClosedFormEqual;
  std::optional<int> order;  // iteration order (or iteration count) for IteratedGeneral
};

/// Both countries' bids at a common value of the private variable.
struct StrategyValue {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Coefficients of the exact r = 0 boundary equation a K0 + b K0^(-lambda/beta) = c.
struct BoundaryCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

namespace detail {

inline void require_alpha_below_one(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0, 1)");
}

}  // namespace detail

inline BoundaryCoefficients boundary_coefficients(double lambda, double beta, double alpha) {
  detail::require(lambda > 0.0 && beta > 0.0, "lambda and beta must be positive");
  detail::require_alpha_below_one(alpha);

  const double p = beta / lambda;
  const double q = lambda / beta;
  const double om = 1.0 - alpha;
  const double cross1 = beta * lambda + beta + 2.0 * lambda;
  const double cross2 = 1.0 + 2.0 * beta + lambda;

  BoundaryCoefficients out;
  out.a = lambda * (1.0 - std::pow(alpha, 1.0 + 2.0 * p)) / ((lambda + 2.0 * beta) * om);
  out.b = lambda * beta * (1.0 - std::pow(alpha, 1.0 + 2.0 * q)) / ((2.0 * lambda + beta) * (alpha - 1.0));
  out.c = -beta * lambda / (beta + 2.0 * lambda) +
          alpha * lambda * cross1 * (1.0 - std::pow(alpha, 1.0 + p)) /
              ((beta + lambda) * (beta + 2.0 * lambda) * om) +
          lambda / (2.0 * beta + lambda) -
          alpha * beta * lambda * cross2 * (1.0 - std::pow(alpha, 1.0 + q)) /
              ((beta + lambda) * (2.0 * beta + lambda) * om);
  return out;
}

/// g(K0) = a K0 + b K0^(-lambda/beta) - c.
inline double boundary_residual(const BoundaryCoefficients& bc, double k0, double lambda, double beta) {
  return bc.a * k0 + bc.b * std::pow(k0, -lambda / beta) - bc.c;
}

/// Exact solution for lambda == beta. Of the two roots {1, -beta} of the
/// reduced boundary equation only K0 = 1 keeps the strategy coupling positive.
inline EquilibriumSolution solve_equal(double beta, double alpha) {
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  detail::require_alpha_below_one(alpha);
  const double k2 = alpha * alpha * alpha * (beta + 1.0) / (6.0 * (1.0 - alpha));
  return {1.0, k2 / beta, k2, SolveMethod::ClosedFormEqual, std::nullopt};
}

/// Closed-form strategies for lambda == beta on r in [0, 1].
///
/// Written as f1 = (beta+1)/(3 beta) * [r - alpha/(2(1-alpha)) * (1 - (alpha/s)^2)]
/// with s = (1-alpha) r + alpha, so that f(0) = 0 holds exactly and the
/// alpha = r = 0 corner needs no 0/0 limit. f2 uses (beta+1)/3 in front.
inline StrategyValue eval_equal_strategy(double r, double beta, double alpha) {
  detail::require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "r must lie in [0, 1]");
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  detail::require_alpha_below_one(alpha);

  double bracket = r;
  if (alpha > 0.0) {
    const double ratio = alpha / ((1.0 - alpha) * r + alpha);
    bracket -= alpha / (2.0 * (1.0 - alpha)) * (1.0 - ratio * ratio);
  }
  return {(beta + 1.0) / (3.0 * beta) * bracket, (beta + 1.0) / 3.0 * bracket};
}

/// Analytic derivative df1/dr of the equal-case strategy; df2/dr = beta * df1/dr.
inline double equal_strategy_slope(double r, double beta, double alpha) {
  const double s = (1.0 - alpha) * r + alpha;
  if (s == 0.0) return (beta + 1.0) / (3.0 * beta);
  const double ratio = alpha / s;
  return (beta + 1.0) / (3.0 * beta) * (1.0 - ratio * ratio * ratio);
}

}  // namespace apc
