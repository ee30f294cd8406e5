#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"
#include "apc/numerics/adaptive_simpson.hpp"
#include "apc/numerics/bisection.hpp"
#include "apc/numerics/golden_section.hpp"
#include "apc/strategy.hpp"

namespace apc {

struct TableRow {
  double r = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  bool feasible1 = true;
  bool feasible2 = true;
};

/// Sampled strategy pair on a strictly increasing grid inside [eps, 1].
struct StrategyTable {
  std::vector<TableRow> grid;
  ConflictRatios params;
  EquilibriumSolution solution;
};

inline constexpr std::size_t kDefaultGridSize = 1024;

/// Samples `sol` on a uniform grid of n points spanning [eps, 1].
inline StrategyTable make_strategy_table(const ConflictRatios& params, const EquilibriumSolution& sol,
                                         std::size_t n = kDefaultGridSize) {
  detail::require(n >= 2, "grid size must be at least 2");
  StrategyTable t{{}, params, sol};
  t.grid.reserve(n);
  const double lo = params.epsilon;
  const StrategyPair strategy(params, sol);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i + 1 == n ? 1.0 : lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const auto v = strategy(r);
    t.grid.push_back({r, v.f1, v.f2, is_feasible(r, v.f1), is_feasible(r, v.f2)});
  }
  return t;
}

inline void check_table(const StrategyTable& t) {
  if (t.grid.size() < 2) throw OracleError("strategy table needs at least two rows");
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const auto& row = t.grid[i];
    if (!std::isfinite(row.r) || !std::isfinite(row.f1) || !std::isfinite(row.f2)) {
      throw OracleError("strategy table contains non-finite values");
    }
    if (i > 0 && !(row.r > t.grid[i - 1].r)) throw OracleError("strategy table grid must be strictly increasing");
  }
}

/// Piecewise-linear view of a table column; nodes double as quadrature breakpoints.
class TableInterpolant {
public:
  enum class Column { F1, F2 };

  TableInterpolant(const StrategyTable& t, Column col) {
    check_table(t);
    nodes_.reserve(t.grid.size());
    values_.reserve(t.grid.size());
    for (const auto& row : t.grid) {
      nodes_.push_back(row.r);
      values_.push_back(col == Column::F1 ? row.f1 : row.f2);
    }
  }

  double operator()(double r) const {
    if (r <= nodes_.front()) return values_.front();
    if (r >= nodes_.back()) return values_.back();
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    const auto j = static_cast<std::size_t>(it - nodes_.begin());
    const double w = (r - nodes_[j - 1]) / (nodes_[j] - nodes_[j - 1]);
    return values_[j - 1] + w * (values_[j] - values_[j - 1]);
  }

  std::span<const double> nodes() const { return nodes_; }

private:
  std::vector<double> nodes_;
  std::vector<double> values_;
};

/// Country 1's expected payoff u1(y | r1) against a fixed country-2 strategy,
/// r2 uniform on [lo, 1], in ratio units (beta1 = beta, beta2 = 1).
///
/// Country 1 wins on {r2 : f2(r2) < lambda y}. That set is located on the
/// node grid and refined by bisection, so f2 need not be monotone; for a
/// monotone f2 it is [lo, f2^-1(lambda y)] clamped to [lo, 1].
template <class F2>
class ResponsePayoff {
public:
  ResponsePayoff(F2 f2, std::vector<double> nodes, double lambda, double beta, double alpha,
                 numerics::SimpsonOptions quad = {})
      : f2_(std::move(f2)), nodes_(std::move(nodes)), lambda_(lambda), beta_(beta), alpha_(alpha), quad_(quad) {
    if (nodes_.size() < 2) throw OracleError("response payoff needs at least two nodes");
    values_.reserve(nodes_.size());
    for (double r : nodes_) values_.push_back(f2_(r));
    prefix_.assign(nodes_.size(), 0.0);
    const numerics::SimpsonOptions cell_quad{quad_.abs_tol / static_cast<double>(nodes_.size()), quad_.max_depth};
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
      prefix_[j] = prefix_[j - 1] + numerics::adaptive_simpson(surplus(), nodes_[j - 1], nodes_[j], cell_quad);
    }
  }

  double lo() const { return nodes_.front(); }

  double operator()(double y, double r1) const {
    const double threshold = lambda_ * y;
    const double stake = beta_ * (r1 - y);
    const double width = nodes_.back() - nodes_.front();

    double won_length = 0.0;
    double won_surplus = 0.0;
    double lost_length = 0.0;

    // Walk the cells, splitting each at a sign change of f2 - lambda y.
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
      const double a = nodes_[j - 1];
      const double b = nodes_[j];
      const bool win_a = values_[j - 1] < threshold;
      const bool win_b = values_[j] < threshold;
      if (win_a == win_b) {
        if (win_a) {
          won_length += b - a;
          won_surplus += prefix_[j] - prefix_[j - 1];
        } else {
          lost_length += b - a;
        }
        continue;
      }
      const double cut =
          numerics::bisect([&](double r) { return f2_(r) - threshold; }, a, b, 1e-14 * std::max(1.0, b));
      const double left_len = cut - a;
      const double right_len = b - cut;
      const auto left_surplus = [&] { return numerics::adaptive_simpson(surplus(), a, cut, quad_); };
      const auto right_surplus = [&] { return numerics::adaptive_simpson(surplus(), cut, b, quad_); };
      if (win_a) {
        won_length += left_len;
        won_surplus += left_surplus();
        lost_length += right_len;
      } else {
        lost_length += left_len;
        won_length += right_len;
        won_surplus += right_surplus();
      }
    }
    const double total =
        stake * won_length + (1.0 - alpha_) * won_surplus + alpha_ * stake * lost_length;
    return total / width;
  }

private:
  auto surplus() const {
    return [this](double r) { return r - f2_(r); };
  }

  F2 f2_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> prefix_;
  double lambda_;
  double beta_;
  double alpha_;
  numerics::SimpsonOptions quad_;
};

namespace detail {

inline ResponsePayoff<TableInterpolant> table_payoff(const StrategyTable& table) {
  TableInterpolant f2(table, TableInterpolant::Column::F2);
  std::vector<double> nodes(f2.nodes().begin(), f2.nodes().end());
  return {std::move(f2), std::move(nodes), table.params.lambda, table.params.beta, table.params.alpha};
}

}  // namespace detail

/// u1(y) for country 1 holding r1, against the table's country-2 strategy.
inline double u1_payoff(double y, double r1, const StrategyTable& table) {
  detail::require(y >= 0.0, "bid y must be nonnegative");
  return detail::table_payoff(table)(y, r1);
}

struct BestResponseOptions {
  std::size_t coarse_points = 1024;
  double y_max = 1.0;
  double tol = 1e-6;
};

/// Maximizer of a payoff over y in [0, y_max]: coarse scan, then golden
/// section inside the bracket around the best coarse point.
template <class Payoff>
double best_response(const Payoff& u, double r1, BestResponseOptions opts = {}) {
  const std::size_t n = std::max<std::size_t>(opts.coarse_points, 3);
  const double h = opts.y_max / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_val = u(0.0, r1);
  for (std::size_t i = 1; i < n; ++i) {
    const double v = u(h * static_cast<double>(i), r1);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = h * static_cast<double>(best == 0 ? 0 : best - 1);
  const double hi = std::min(opts.y_max, h * static_cast<double>(best + 1));
  const double refined = numerics::golden_section_maximize([&](double y) { return u(y, r1); }, lo, hi, opts.tol);
  return u(refined, r1) >= best_val ? refined : h * static_cast<double>(best);
}

inline double best_response(double r1, const StrategyTable& table, BestResponseOptions opts = {}) {
  return best_response(detail::table_payoff(table), r1, opts);
}

enum class FdOrder { Second, Fourth };

struct OdeResidual {
  double res1 = 0.0;
  double res2 = 0.0;
};

/// Largest deviation, over interior grid points, of the sampled strategies
/// from the pair of first-order best-response ODEs:
///   lambda f1' = K0 s^(p-1) - alpha/s - (1-alpha)(beta+lambda) f1/s + (1-alpha) beta r/s
///   beta f2'   = lambda beta K0^(-q) s^(q-1) - lambda beta alpha/s
///                - (1-alpha)(beta+lambda) f2/s + (1-alpha) lambda r/s
/// with s = (1-alpha) r + alpha, p = beta/lambda, q = lambda/beta and K0
/// taken from the table's solution. Derivatives are central differences on
/// the (uniform) grid; `Fourth` uses the five-point stencil.
inline OdeResidual ode_residual(const StrategyTable& table, FdOrder order = FdOrder::Fourth) {
  check_table(table);
  const auto& g = table.grid;
  const std::size_t n = g.size();
  const std::size_t half = order == FdOrder::Fourth ? 2 : 1;
  if (n < 2 * half + 1) throw OracleError("grid too small for central differences");

  const double h = (g.back().r - g.front().r) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(g[i].r - g[i - 1].r - h) > 1e-9 * std::max(1.0, h)) {
      throw OracleError("ode_residual requires a uniform grid");
    }
  }

  const auto& p = table.params;
  const double lambda = p.lambda, beta = p.beta, alpha = p.alpha;
  const double om = 1.0 - alpha;
  const double k0 = table.solution.k0;
  const double k0_pow = std::pow(k0, -lambda / beta);

  auto deriv = [&](std::size_t i, auto column) {
    if (order == FdOrder::Second) return (column(g[i + 1]) - column(g[i - 1])) / (2.0 * h);
    return (column(g[i - 2]) - 8.0 * column(g[i - 1]) + 8.0 * column(g[i + 1]) - column(g[i + 2])) / (12.0 * h);
  };
  const auto col1 = [](const TableRow& row) { return row.f1; };
  const auto col2 = [](const TableRow& row) { return row.f2; };

  OdeResidual out;
  for (std::size_t i = half; i + half < n; ++i) {
    const double r = g[i].r;
    const double s = om * r + alpha;
    if (s <= 0.0) continue;
    const double rhs1 = k0 * std::pow(s, beta / lambda - 1.0) - alpha / s - om * (beta + lambda) * g[i].f1 / s +
                        om * beta * r / s;
    const double rhs2 = lambda * beta * k0_pow * std::pow(s, lambda / beta - 1.0) - lambda * beta * alpha / s -
                        om * (beta + lambda) * g[i].f2 / s + om * lambda * r / s;
    out.res1 = std::max(out.res1, std::abs(lambda * deriv(i, col1) - rhs1));
    out.res2 = std::max(out.res2, std::abs(beta * deriv(i, col2) - rhs2));
  }
  return out;
}

/// Unique positive root of a K0 + b K0^(-lambda/beta) = c. Since a > 0 and
/// b <= 0 the left side is strictly increasing, so a sign-change bracket
/// is grown outward from K0 = 1 and then bisected.
inline double solve_k0_root(double lambda, double beta, double alpha, double x_tol = 1e-12) {
  const auto bc = boundary_coefficients(lambda, beta, alpha);
  const auto g = [&](double k) { return boundary_residual(bc, k, lambda, beta); };

  constexpr double kMax = 1e6;
  constexpr double kMin = 1e-12;
  double hi = 1.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > kMax) throw OracleError("no sign change for K0 below 1e6");
  }
  double lo = std::min(1.0, hi);
  while (g(lo) > 0.0) {
    lo *= 0.5;
    if (lo < kMin) throw OracleError("no sign change for K0 above 1e-12");
  }
  if (lo == hi) return lo;
  return numerics::bisect(g, lo, hi, x_tol);
}

inline double solve_k0_root(const ConflictRatios& p) { return solve_k0_root(p.lambda, p.beta, p.alpha); }

}  // namespace apc
