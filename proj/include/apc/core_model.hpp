#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "apc/errors.hpp"

namespace apc {

/// Public characteristics of one country before normalization.
struct CountryParams {
  double aggression = 1.0;          // raw aggressive power
  double production = 1.0;          // raw production level
  double expected_resource = 1.0;   // expected resource level R_i
};

/// Ratio coordinates every solver works in. Country 1 is always the one with
/// the aggressive advantage (beta <= lambda); `swapped` records a relabeling.
struct ConflictRatios {
  double lambda = 1.0;
  double beta = 1.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  bool swapped = false;
};

/// Relative tolerance under which lambda and beta count as equal.
inline constexpr double kEqualCaseRelTol = 1e-12;

/// Largest admissible lower cutoff of the private resource variable.
inline constexpr double kMaxEpsilon = 0.1;

inline bool is_equal_case(double lambda, double beta) {
  return std::abs(lambda - beta) <= kEqualCaseRelTol * std::max(lambda, beta);
}

inline bool is_equal_case(const ConflictRatios& p) { return is_equal_case(p.lambda, p.beta); }

/// Throws DomainError unless `p` satisfies the ConflictRatios invariants.
inline void validate(const ConflictRatios& p) {
  using detail::require;
  require(std::isfinite(p.lambda) && p.lambda > 0.0, "lambda must be positive and finite");
  require(std::isfinite(p.beta) && p.beta > 0.0, "beta must be positive and finite");
  require(p.beta <= p.lambda, "ratios must be oriented so that beta <= lambda");
  require(std::isfinite(p.alpha) && p.alpha >= 0.0 && p.alpha < 1.0, "alpha must lie in [0, 1)");
  require(std::isfinite(p.epsilon) && p.epsilon >= 0.0 && p.epsilon < kMaxEpsilon,
          "epsilon must lie in [0, 0.1)");
  require(is_equal_case(p) || p.epsilon > 0.0, "epsilon must be positive when lambda != beta");
}

/// Builds validated ratios from lambda and beta given directly. When
/// beta > lambda the countries are relabeled (both ratios inverted).
inline ConflictRatios make_ratios(double lambda, double beta, double alpha, double epsilon) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive and finite");
  detail::require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  ConflictRatios p{lambda, beta, alpha, epsilon, false};
  if (beta > lambda) {
    p.lambda = 1.0 / lambda;
    p.beta = 1.0 / beta;
    p.swapped = true;
  }
  validate(p);
  return p;
}

/// How the expected resource levels enter the maximum aggression/production.
/// `SharedR1` scales both countries by 2 R_1 (the published convention),
/// `PerCountry` scales country i by 2 R_i.
enum class ResourceScaling { SharedR1, PerCountry };

/// Ratio coordinates from raw country parameters. Under `SharedR1` the
/// common factor cancels and only the raw aggression/production ratios remain.
inline ConflictRatios normalize_ratios(const CountryParams& c1, const CountryParams& c2, double alpha,
                                       double epsilon,
                                       ResourceScaling scaling = ResourceScaling::SharedR1) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  for (const auto* c : {&c1, &c2}) {
    detail::require(positive(c->aggression) && positive(c->production) && positive(c->expected_resource),
                    "country parameters must be positive and finite");
  }
  detail::require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0, 1)");

  double lambda = c1.aggression / c2.aggression;
  double beta = c1.production / c2.production;
  if (scaling == ResourceScaling::PerCountry) {
    const double r = c1.expected_resource / c2.expected_resource;
    lambda *= r;
    beta *= r;
  }
  return make_ratios(lambda, beta, alpha, epsilon);
}

/// A resource allocation to aggression, b, given the private variable r.
struct Bid {
  double r = 0.0;
  double b = 0.0;
};

enum class Winner { Country1, Country2, Tie };

inline std::string to_string(Winner w) {
  switch (w) {
    case Winner::Country1: return "country1";
    case Winner::Country2: return "country2";
    case Winner::Tie: return "tie";
  }
  return "unknown";
}

struct PayoffOutcome {
  double w1 = 0.0;
  double w2 = 0.0;
  Winner winner = Winner::Tie;
};

/// Conflict payoff. The larger aggressive product lambda_i * b_i wins, keeps
/// its own production and takes (1 - alpha) of the loser's; the loser keeps
/// alpha of its production. Equal products are a tie (exact comparison).
/// alpha = 1 is allowed here.
inline PayoffOutcome payoff(double r1, double b1, double r2, double b2, double beta1, double beta2,
                            double lambda1, double lambda2, double alpha) {
  detail::require(beta1 > 0.0 && beta2 > 0.0 && lambda1 > 0.0 && lambda2 > 0.0,
                  "payoff rates must be positive");
  detail::require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  detail::require(b1 >= 0.0 && b2 >= 0.0, "bids must be nonnegative");

  const double keep1 = beta1 * (r1 - b1);
  const double keep2 = beta2 * (r2 - b2);
  const double force1 = lambda1 * b1;
  const double force2 = lambda2 * b2;

  if (force1 > force2) return {keep1 + (1.0 - alpha) * keep2, alpha * keep2, Winner::Country1};
  if (force1 < force2) return {alpha * keep1, keep2 + (1.0 - alpha) * keep1, Winner::Country2};
  return {keep1, keep2, Winner::Tie};
}

inline PayoffOutcome payoff(const Bid& c1, const Bid& c2, double beta1, double beta2, double lambda1,
                            double lambda2, double alpha) {
  return payoff(c1.r, c1.b, c2.r, c2.b, beta1, beta2, lambda1, lambda2, alpha);
}

}  // namespace apc
