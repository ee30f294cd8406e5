#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"
#include "apc/numerics/pairwise_sum.hpp"
#include "apc/solve.hpp"
#include "apc/strategy.hpp"

namespace apc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (key, counter), so any draw can be produced independently.
class Philox4x32 {
public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(Block ctr) const {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  /// Two uniforms in [0, 1) with 53 random bits each, for draw `index`.
  std::array<double, 2> uniforms(std::uint64_t index) const {
    const Block out = (*this)({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u});
    auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
      const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
      return static_cast<double>(bits) * 0x1.0p-53;
    };
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
  std::array<std::uint32_t, 2> key_;
};

struct SimulationSummary {
  std::uint64_t n_draws = 0;
  double win_prob_1 = 0.0;
  double win_prob_2 = 0.0;
  double tie_prob = 0.0;
  double mean_payoff_1 = 0.0;
  double mean_payoff_2 = 0.0;
  double mean_production = 0.0;  // mean of beta (r1 - b1) + (r2 - b2)
  double mean_transfer = 0.0;    // mean (1 - alpha) share moved to the winner
  double infeasible_bid_rate = 0.0;
  double max_conservation_error = 0.0;  // per-draw relative |w1 + w2 - production|
  std::uint64_t seed = 0;
};

/// One simulated conflict, in ratio units (beta1 = beta, beta2 = 1).
struct DrawRecord {
  std::uint64_t draw = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  Winner winner = Winner::Tie;
  double w1 = 0.0;
  double w2 = 0.0;
  double production = 0.0;
  double transfer = 0.0;
  bool infeasible = false;
  double conservation_error = 0.0;
};

enum class SolutionSource { EqualClosedForm, GeneralIterated };

struct SimulationOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::function<void(const DrawRecord&)> trace;  // called in draw order; forces a single worker
};

/// Draws are grouped in fixed blocks; block sums and the final reduction use
/// pairwise summation in block order, so the summary does not depend on the
/// number of workers.
inline constexpr std::uint64_t kSimulationBlock = 4096;

/// Resolves one draw. Negative bids are played as zero (a country cannot
/// divert negative resources); any bid outside [0, r] marks the draw infeasible.
inline DrawRecord simulate_draw(const StrategyPair& strategy, const Philox4x32& rng, std::uint64_t index, double lo) {
  const auto& p = strategy.params();
  const auto u = rng.uniforms(index);
  DrawRecord d;
  d.draw = index;
  d.r1 = lo + (1.0 - lo) * u[0];
  d.r2 = lo + (1.0 - lo) * u[1];
  const double raw1 = strategy(d.r1).f1;
  const double raw2 = strategy(d.r2).f2;
  d.infeasible = !is_feasible(d.r1, raw1) || !is_feasible(d.r2, raw2);
  d.b1 = std::max(raw1, 0.0);
  d.b2 = std::max(raw2, 0.0);

  const auto out = payoff(d.r1, d.b1, d.r2, d.b2, p.beta, 1.0, p.lambda, 1.0, p.alpha);
  d.winner = out.winner;
  d.w1 = out.w1;
  d.w2 = out.w2;
  const double keep1 = p.beta * (d.r1 - d.b1);
  const double keep2 = d.r2 - d.b2;
  d.production = keep1 + keep2;
  d.transfer = out.winner == Winner::Country1   ? (1.0 - p.alpha) * keep2
               : out.winner == Winner::Country2 ? (1.0 - p.alpha) * keep1
                                                : 0.0;
  const double scale = std::abs(keep1) + std::abs(keep2);
  const double err = std::abs(d.w1 + d.w2 - d.production);
  d.conservation_error = scale > 0.0 ? err / scale : err;
  return d;
}

namespace detail {

struct BlockTotals {
  std::uint64_t wins1 = 0;
  std::uint64_t wins2 = 0;
  std::uint64_t ties = 0;
  std::uint64_t infeasible = 0;
  double payoff1 = 0.0;
  double payoff2 = 0.0;
  double production = 0.0;
  double transfer = 0.0;
  double max_error = 0.0;
};

inline BlockTotals run_block(const StrategyPair& strategy, const Philox4x32& rng, std::uint64_t begin,
                             std::uint64_t end, double lo, const std::function<void(const DrawRecord&)>& trace) {
  const auto len = static_cast<std::size_t>(end - begin);
  std::vector<double> w1(len), w2(len), prod(len), transfer(len);
  BlockTotals t;
  for (std::size_t k = 0; k < len; ++k) {
    const DrawRecord d = simulate_draw(strategy, rng, begin + k, lo);
    if (trace) trace(d);
    switch (d.winner) {
      case Winner::Country1: ++t.wins1; break;
      case Winner::Country2: ++t.wins2; break;
      case Winner::Tie: ++t.ties; break;
    }
    if (d.infeasible) ++t.infeasible;
    w1[k] = d.w1;
    w2[k] = d.w2;
    prod[k] = d.production;
    transfer[k] = d.transfer;
    t.max_error = std::max(t.max_error, d.conservation_error);
  }
  t.payoff1 = numerics::pairwise_sum(w1);
  t.payoff2 = numerics::pairwise_sum(w2);
  t.production = numerics::pairwise_sum(prod);
  t.transfer = numerics::pairwise_sum(transfer);
  return t;
}

}  // namespace detail

/// Monte-Carlo conflicts under a fixed strategy pair. Private values are
/// uniform on [0, 1] for the closed-form solution and on [eps, 1] otherwise.
inline SimulationSummary simulate(const StrategyPair& strategy, std::uint64_t n, std::uint64_t seed,
                                  const SimulationOptions& opts = {}) {
  detail::require(n >= 1, "number of draws must be at least 1");
  const double lo =
      strategy.solution().method == SolveMethod::ClosedFormEqual ? 0.0 : strategy.params().epsilon;
  const Philox4x32 rng(seed);

  const std::uint64_t n_blocks = (n + kSimulationBlock - 1) / kSimulationBlock;
  std::vector<detail::BlockTotals> blocks(static_cast<std::size_t>(n_blocks));
  auto block_range = [&](std::uint64_t b) {
    return std::pair{b * kSimulationBlock, std::min(n, (b + 1) * kSimulationBlock)};
  };

  unsigned workers = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  if (opts.trace) workers = 1;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));

  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
      const auto [begin, end] = block_range(b);
      blocks[b] = detail::run_block(strategy, rng, begin, end, lo, opts.trace);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < n_blocks; b = next++) {
          const auto [begin, end] = block_range(b);
          blocks[b] = detail::run_block(strategy, rng, begin, end, lo, {});
        }
      });
    }
  }

  std::vector<double> payoff1, payoff2, production, transfer;
  SimulationSummary s;
  s.n_draws = n;
  s.seed = seed;
  std::uint64_t wins1 = 0, wins2 = 0, ties = 0, infeasible = 0;
  for (const auto& b : blocks) {
    wins1 += b.wins1;
    wins2 += b.wins2;
    ties += b.ties;
    infeasible += b.infeasible;
    payoff1.push_back(b.payoff1);
    payoff2.push_back(b.payoff2);
    production.push_back(b.production);
    transfer.push_back(b.transfer);
    s.max_conservation_error = std::max(s.max_conservation_error, b.max_error);
  }
  const double nd = static_cast<double>(n);
  s.win_prob_1 = static_cast<double>(wins1) / nd;
  s.win_prob_2 = static_cast<double>(wins2) / nd;
  s.tie_prob = static_cast<double>(ties) / nd;
  s.infeasible_bid_rate = static_cast<double>(infeasible) / nd;
  s.mean_payoff_1 = numerics::pairwise_sum(payoff1) / nd;
  s.mean_payoff_2 = numerics::pairwise_sum(payoff2) / nd;
  s.mean_production = numerics::pairwise_sum(production) / nd;
  s.mean_transfer = numerics::pairwise_sum(transfer) / nd;
  return s;
}

/// Solves for the requested source, then simulates.
inline SimulationSummary simulate(const ConflictRatios& params, SolutionSource source, std::uint64_t n,
                                  std::uint64_t seed, const SimulationOptions& opts = {},
                                  SolverChoice general_method = SolverChoice::Order2) {
  const SolverChoice choice = source == SolutionSource::EqualClosedForm ? SolverChoice::Equal : general_method;
  detail::require(source == SolutionSource::EqualClosedForm || choice != SolverChoice::Equal,
                  "general source cannot use the closed-form method");
  const auto solved = solve(params, choice);
  return simulate(StrategyPair(params, solved.solution), n, seed, opts);
}

}  // namespace apc
