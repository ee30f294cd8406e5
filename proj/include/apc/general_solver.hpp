#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"

namespace apc {

/// Constants of the K0 fixed-point condition C2 K0 + C1 K0^(-lambda/beta) = C3.
struct CConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

struct SolverDiagnostics {
  std::vector<double> k0_trace{1.0};
  double residual_bc_left1 = 0.0;  // |f1(eps)|
  double residual_bc_left2 = 0.0;  // |f2(eps)|
  double residual_bc_right = 0.0;  // |f1(1) - f2(1)/lambda|
  double fixed_point_residual = 0.0;
  bool converged = true;
};

/// Admissible alpha band for the regularized solver.
inline constexpr double kGeneralAlphaMin = 1e-6;
inline constexpr double kGeneralAlphaMax = 1.0 - 1e-6;

inline constexpr double kDefaultEpsilon = 1e-3;

namespace detail {

/// alpha^e through exp/log, stable for very small alpha and large |e|.
inline double alpha_pow(double alpha, double e) { return std::exp(e * std::log(alpha)); }

/// Shared pieces of the regularized boundary conditions.
struct RegularizedTerms {
  double p = 0.0;      // beta / lambda
  double q = 0.0;      // lambda / beta
  double x = 0.0;      // (1 - alpha) eps / alpha
  double d1 = 0.0;     // (lambda + 2 beta)(1 - alpha)
  double d2 = 0.0;     // (2 lambda + beta)(1 - alpha)
  double off1 = 0.0;   // constant offset of f1
  double off2 = 0.0;   // constant offset of f2
  double den1 = 0.0;   // (1 + p) x - 1
  double den2 = 0.0;   // (1 + q) x - 1
};

inline void check_general_domain(double lambda, double beta, double alpha, double epsilon) {
  require(std::isfinite(lambda) && std::isfinite(beta) && lambda > 0.0 && beta > 0.0,
          "lambda and beta must be positive and finite");
  require(beta <= lambda * (1.0 + kEqualCaseRelTol), "general solver requires beta <= lambda");
  require(std::isfinite(alpha) && alpha >= kGeneralAlphaMin && alpha <= kGeneralAlphaMax,
          "general solver requires alpha in [1e-6, 1 - 1e-6]");
  require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < kMaxEpsilon, "epsilon must lie in [0, 0.1)");
  require(epsilon > 0.0 || is_equal_case(lambda, beta), "epsilon must be positive when lambda != beta");
}

inline RegularizedTerms regularized_terms(double lambda, double beta, double alpha, double epsilon) {
  check_general_domain(lambda, beta, alpha, epsilon);
  RegularizedTerms t;
  const double om = 1.0 - alpha;
  t.p = beta / lambda;
  t.q = lambda / beta;
  t.x = om * epsilon / alpha;
  t.d1 = (lambda + 2.0 * beta) * om;
  t.d2 = (2.0 * lambda + beta) * om;
  t.off1 = alpha * (beta * lambda + beta + 2.0 * lambda) / ((beta + lambda) * (beta + 2.0 * lambda) * om);
  t.off2 = alpha * beta * lambda * (1.0 + 2.0 * beta + lambda) / ((beta + lambda) * (2.0 * beta + lambda) * om);
  t.den1 = (1.0 + t.p) * t.x - 1.0;
  t.den2 = (1.0 + t.q) * t.x - 1.0;
  require(std::abs(t.den1) > 1e-12 && std::abs(t.den2) > 1e-12,
          "epsilon makes the first-order boundary solution singular");
  return t;
}

}  // namespace detail

/// The three constants of the fixed-point condition, assembled from the
/// right boundary condition f1(1) = f2(1)/lambda after eliminating K1, K2.
/// C2 is the K0 coefficient contributed by f1(1), C1 the K0^(-lambda/beta)
/// coefficient moved over from f2(1)/lambda, and C3 the difference of the
/// constant terms.
inline CConstants c_constants(double lambda, double beta, double alpha, double epsilon) {
  const auto t = detail::regularized_terms(lambda, beta, alpha, epsilon);
  using detail::alpha_pow;

  const double lift1 = alpha_pow(alpha, 1.0 + 2.0 * t.p) * (1.0 + t.p * t.x) / t.den1;
  const double lift2 = alpha_pow(alpha, 1.0 + 2.0 * t.q) * (1.0 + t.q * t.x) / t.den2;

  const double left_const = beta / (beta + 2.0 * lambda) - t.off1 +
                            alpha_pow(alpha, 1.0 + t.p) * (beta * epsilon / (beta + 2.0 * lambda) - t.off1) / t.den1;
  const double right_const = 1.0 / (2.0 * beta + lambda) - t.off2 / lambda +
                             alpha_pow(alpha, 1.0 + t.q) * (epsilon / (2.0 * beta + lambda) - t.off2 / lambda) / t.den2;

  CConstants c;
  c.c2 = (1.0 + lift1) / t.d1;
  c.c1 = -beta / t.d2 * (1.0 + lift2);
  c.c3 = right_const - left_const;
  return c;
}

/// K1 from f1(eps) = 0 with the power terms linearized in eps.
inline double k1_from_k0(double k0, double lambda, double beta, double alpha, double epsilon) {
  detail::require(std::isfinite(k0) && k0 > 0.0, "K0 must be positive");
  const auto t = detail::regularized_terms(lambda, beta, alpha, epsilon);
  const double num = k0 * detail::alpha_pow(alpha, t.p) / t.d1 * (1.0 + t.p * t.x) +
                     beta * epsilon / (beta + 2.0 * lambda) - t.off1;
  return detail::alpha_pow(alpha, 1.0 + t.p) * num / t.den1;
}

/// K2 from f2(eps) = 0 with the power terms linearized in eps.
inline double k2_from_k0(double k0, double lambda, double beta, double alpha, double epsilon) {
  detail::require(std::isfinite(k0) && k0 > 0.0, "K0 must be positive");
  const auto t = detail::regularized_terms(lambda, beta, alpha, epsilon);
  const double num = lambda * beta * std::pow(k0, -t.q) * detail::alpha_pow(alpha, t.q) / t.d2 * (1.0 + t.q * t.x) +
                     lambda * epsilon / (2.0 * beta + lambda) - t.off2;
  return detail::alpha_pow(alpha, 1.0 + t.q) * num / t.den2;
}

/// Evaluates the mutual-best-response family for arbitrary constants.
/// Requires (1 - alpha) r + alpha > 0, or = 0 when K1 = K2 = 0.
inline StrategyValue eval_response_family(double r, double k0, double k1, double k2, double lambda, double beta,
                                          double alpha) {
  const double p = beta / lambda;
  const double q = lambda / beta;
  const double om = 1.0 - alpha;
  const double s = om * r + alpha;
  detail::require(s > 0.0 || (s == 0.0 && k1 == 0.0 && k2 == 0.0),
                  "response family undefined at (1 - alpha) r + alpha <= 0");

  const double off1 = alpha * (beta * lambda + beta + 2.0 * lambda) / ((beta + lambda) * (beta + 2.0 * lambda) * om);
  const double off2 = alpha * beta * lambda * (1.0 + 2.0 * beta + lambda) / ((beta + lambda) * (2.0 * beta + lambda) * om);
  const double ls = std::log(s);

  StrategyValue v;
  v.f1 = k0 / ((lambda + 2.0 * beta) * om) * std::exp(p * ls) + beta / (beta + 2.0 * lambda) * r - off1 +
         (k1 == 0.0 ? 0.0 : k1 * std::exp(-(1.0 + p) * ls));
  v.f2 = lambda * beta * std::pow(k0, -q) / ((2.0 * lambda + beta) * om) * std::exp(q * ls) +
         lambda / (2.0 * beta + lambda) * r - off2 + (k2 == 0.0 ? 0.0 : k2 * std::exp(-(1.0 + q) * ls));
  return v;
}

/// Regularized strategies on [eps, 1] for a solution's constants.
inline StrategyValue eval_general_strategy(double r, const EquilibriumSolution& sol, double lambda, double beta,
                                           double alpha, double epsilon) {
  detail::require(std::isfinite(r) && r >= epsilon && r <= 1.0, "r must lie in [epsilon, 1]");
  return eval_response_family(r, sol.k0, sol.k1, sol.k2, lambda, beta, alpha);
}

inline StrategyValue eval_general_strategy(double r, const EquilibriumSolution& sol, const ConflictRatios& p) {
  return eval_general_strategy(r, sol, p.lambda, p.beta, p.alpha, p.epsilon);
}

/// |C2 K0 + C1 K0^(-lambda/beta) - C3|.
inline double fixed_point_residual(const CConstants& c, double k0, double lambda, double beta) {
  return std::abs(c.c2 * k0 + c.c1 * std::pow(k0, -lambda / beta) - c.c3);
}

/// One application of K0 <- (C3 - C1 K0^(-lambda/beta)) / C2.
inline double fixed_point_map(const CConstants& c, double k0, double lambda, double beta) {
  return (c.c3 - c.c1 * std::pow(k0, -lambda / beta)) / c.c2;
}

enum class Relaxation {
  None,      // plain iteration of the fixed-point map
  Adaptive,  // step scaled by 1 / (1 - map'(K0)); same fixed points
};

struct ConvergeOptions {
  double tol = 1e-10;
  int max_iter = 100;
  Relaxation relaxation = Relaxation::Adaptive;
};

struct IterationMode {
  enum class Kind { Order0, Order1, Order2, Converge };
  Kind kind = Kind::Order2;
  ConvergeOptions converge{};

  static IterationMode order(int n) {
    detail::require(n >= 0 && n <= 2, "iteration order must be 0, 1 or 2");
    return {n == 0 ? Kind::Order0 : n == 1 ? Kind::Order1 : Kind::Order2, {}};
  }
  static IterationMode until_converged(ConvergeOptions opts = {}) { return {Kind::Converge, opts}; }
};

struct GeneralSolveResult {
  EquilibriumSolution solution;
  SolverDiagnostics diagnostics;
};

/// Left and right boundary residuals of a solution under regularized conditions.
inline void fill_boundary_residuals(SolverDiagnostics& d, const EquilibriumSolution& sol, double lambda, double beta,
                                    double alpha, double epsilon) {
  const auto left = eval_response_family(epsilon, sol.k0, sol.k1, sol.k2, lambda, beta, alpha);
  const auto right = eval_response_family(1.0, sol.k0, sol.k1, sol.k2, lambda, beta, alpha);
  d.residual_bc_left1 = std::abs(left.f1);
  d.residual_bc_left2 = std::abs(left.f2);
  d.residual_bc_right = std::abs(right.f1 - right.f2 / lambda);
}

/// Solves for K0 by the requested iteration order (or to convergence), then
/// K1 and K2 from the regularized left boundary conditions.
inline GeneralSolveResult iterate_k0(double lambda, double beta, double alpha, double epsilon, IterationMode mode) {
  const CConstants c = c_constants(lambda, beta, alpha, epsilon);
  const double q = lambda / beta;

  std::vector<double> trace{1.0};
  auto check_positive = [&](double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw DivergenceError("K0 iterate left the positive half-line", trace);
    }
  };

  double k0 = 1.0;
  bool converged = true;
  int order = 0;

  switch (mode.kind) {
    case IterationMode::Kind::Order0:
      break;
    case IterationMode::Kind::Order1:
    case IterationMode::Kind::Order2: {
      const int steps = mode.kind == IterationMode::Kind::Order1 ? 1 : 2;
      for (int i = 0; i < steps; ++i) {
        k0 = fixed_point_map(c, k0, lambda, beta);
        trace.push_back(k0);
        check_positive(k0);
      }
      order = steps;
      break;
    }
    case IterationMode::Kind::Converge: {
      const auto& opts = mode.converge;
      detail::require(opts.tol > 0.0 && opts.max_iter >= 1, "invalid convergence options");
      double best = k0;
      double best_res = fixed_point_residual(c, k0, lambda, beta);
      converged = false;
      for (int i = 0; i < opts.max_iter; ++i) {
        const double mapped = fixed_point_map(c, k0, lambda, beta);
        double next = mapped;
        if (opts.relaxation == Relaxation::Adaptive) {
          const double slope = q * c.c1 * std::pow(k0, -q - 1.0) / c.c2;
          double omega = slope < 1.0 ? 1.0 / (1.0 - slope) : 1.0;
          next = k0 + omega * (mapped - k0);
          for (int h = 0; h < 60 && !(next > 0.0); ++h) {
            omega *= 0.5;
            next = k0 + omega * (mapped - k0);
          }
        }
        trace.push_back(next);
        check_positive(next);
        const double step = std::abs(next - k0);
        k0 = next;
        order = i + 1;
        const double res = fixed_point_residual(c, k0, lambda, beta);
        if (res < best_res) {
          best_res = res;
          best = k0;
        }
        if (step <= opts.tol) {
          converged = true;
          break;
        }
      }
      if (!converged) k0 = best;
      break;
    }
  }

  GeneralSolveResult out;
  out.solution.k0 = k0;
  out.solution.k1 = k1_from_k0(k0, lambda, beta, alpha, epsilon);
  out.solution.k2 = k2_from_k0(k0, lambda, beta, alpha, epsilon);
  out.solution.method = SolveMethod::IteratedGeneral;
  out.solution.order = order;

  out.diagnostics.k0_trace = std::move(trace);
  out.diagnostics.converged = converged;
  out.diagnostics.fixed_point_residual = fixed_point_residual(c, k0, lambda, beta);
  fill_boundary_residuals(out.diagnostics, out.solution, lambda, beta, alpha, epsilon);
  return out;
}

inline GeneralSolveResult iterate_k0(const ConflictRatios& p, IterationMode mode) {
  return iterate_k0(p.lambda, p.beta, p.alpha, p.epsilon, mode);
}

}  // namespace apc
