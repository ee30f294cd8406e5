#include <cmath>

#include <gtest/gtest.h>

#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"
#include "apc/general_solver.hpp"

using namespace apc;

namespace {

// Textbook form of the closed-form strategy, kept separate from the
// cancellation-free form used by the library.
double textbook_f1(double r, double beta, double alpha) {
  const double shift = alpha / (1.0 - alpha);
  return (beta + 1) / (3 * beta) * r - alpha * (beta + 1) / (6 * beta * (1 - alpha)) +
         alpha * alpha * alpha * (beta + 1) /
             (6 * beta * std::pow(1 - alpha, 3) * (r + shift) * (r + shift));
}

}  // namespace

TEST(BoundaryCoefficients, EqualCaseHalf) {
  const auto bc = boundary_coefficients(1, 1, 0.5);
  EXPECT_NEAR(bc.a, 0.875 / 1.5, 1e-15);
  EXPECT_NEAR(bc.b, -0.875 / 1.5, 1e-15);
  EXPECT_NEAR(bc.c, 0.0, 1e-15);
  EXPECT_NEAR(boundary_residual(bc, 1.0, 1, 1), 0.0, 1e-15);
}

TEST(BoundaryCoefficients, EqualCaseAlphaZero) {
  const auto bc = boundary_coefficients(1, 1, 0.0);
  EXPECT_NEAR(bc.a, 1.0 / 3, 1e-15);
  EXPECT_NEAR(bc.b, -1.0 / 3, 1e-15);
  EXPECT_NEAR(bc.c, 0.0, 1e-15);
}

TEST(BoundaryCoefficients, RejectsAlphaOne) { EXPECT_THROW(boundary_coefficients(1, 1, 1.0), DomainError); }

TEST(BoundaryCoefficients, UnitRootAcrossEqualGrid) {
  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (int i = 0; i < 10; ++i) {
      const double alpha = 0.1 * i;
      const auto bc = boundary_coefficients(beta, beta, alpha);
      EXPECT_GT(bc.a, 0.0);
      EXPECT_LE(bc.b, 0.0);
      EXPECT_LE(std::abs(boundary_residual(bc, 1.0, beta, beta)), 1e-12) << beta << " " << alpha;
    }
  }
}

TEST(SolveEqual, Constants) {
  const auto s = solve_equal(1, 0.5);
  EXPECT_EQ(s.k0, 1.0);
  EXPECT_NEAR(s.k1, 1.0 / 12, 1e-15);
  EXPECT_NEAR(s.k2, 1.0 / 12, 1e-15);
  EXPECT_EQ(s.method, SolveMethod::ClosedFormEqual);

  const auto z = solve_equal(2.5, 0.0);
  EXPECT_EQ(z.k0, 1.0);
  EXPECT_EQ(z.k1, 0.0);
  EXPECT_EQ(z.k2, 0.0);

  const auto b = solve_equal(3.0, 0.4);
  EXPECT_NEAR(b.k2, 3.0 * b.k1, 1e-15);
  EXPECT_THROW(solve_equal(1, 1.0), DomainError);
  EXPECT_THROW(solve_equal(0, 0.5), DomainError);
}

TEST(EvalEqualStrategy, Examples) {
  for (double beta : {0.5, 1.0, 3.0}) {
    for (double alpha : {0.0, 0.3, 0.8}) {
      const auto v = eval_equal_strategy(0.0, beta, alpha);
      EXPECT_EQ(v.f1, 0.0);
      EXPECT_EQ(v.f2, 0.0);
    }
  }
  const auto a0 = eval_equal_strategy(0.5, 1, 0.0);
  EXPECT_NEAR(a0.f1, 1.0 / 3, 1e-15);
  EXPECT_NEAR(a0.f2, 1.0 / 3, 1e-15);

  const auto h = eval_equal_strategy(0.5, 1, 0.5);
  const double expected = 0.5 / 1.5 - 1.0 / 3 + 1.0 / (3 * 1.5 * 1.5);
  EXPECT_NEAR(h.f1, expected, 1e-15);
  EXPECT_NEAR(h.f1, 0.148148148148148, 1e-12);
  EXPECT_NEAR(h.f2, h.f1, 1e-15);

  EXPECT_THROW(eval_equal_strategy(-0.1, 1, 0.5), DomainError);
  EXPECT_THROW(eval_equal_strategy(1.1, 1, 0.5), DomainError);
}

TEST(EvalEqualStrategy, MatchesTextbookFormAndFamily) {
  for (double beta : {0.25, 1.0, 4.0}) {
    for (double alpha : {0.1, 0.5, 0.9}) {
      const auto sol = solve_equal(beta, alpha);
      for (int i = 0; i <= 20; ++i) {
        const double r = i / 20.0;
        const auto v = eval_equal_strategy(r, beta, alpha);
        EXPECT_NEAR(v.f1, textbook_f1(r, beta, alpha), 1e-12);
        const auto fam = eval_response_family(r, sol.k0, sol.k1, sol.k2, beta, beta, alpha);
        EXPECT_NEAR(v.f1, fam.f1, 1e-12);
        EXPECT_NEAR(v.f2, fam.f2, 1e-12);
      }
    }
  }
}

TEST(EvalEqualStrategy, BoundaryConditionsAndProportionality) {
  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (int i = 0; i < 10; ++i) {
      const double alpha = 0.1 * i;
      const auto one = eval_equal_strategy(1.0, beta, alpha);
      EXPECT_LE(std::abs(beta * one.f1 - one.f2), 1e-12);
      for (int k = 0; k <= 100; ++k) {
        const auto v = eval_equal_strategy(k / 100.0, beta, alpha);
        EXPECT_LE(std::abs(v.f2 - beta * v.f1), 1e-12);
      }
    }
  }
}

TEST(EvalEqualStrategy, MonotoneWithPositiveSlope) {
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double alpha : {0.0, 0.4, 0.9}) {
      double prev = -1.0;
      for (int k = 0; k <= 200; ++k) {
        const double r = k / 200.0;
        const double f = eval_equal_strategy(r, beta, alpha).f1;
        EXPECT_GE(f, prev);
        prev = f;
        EXPECT_GE(equal_strategy_slope(r, beta, alpha), 0.0);
        if (k > 0 && k < 200) {
          const double h = 1e-6;
          const double fd = (eval_equal_strategy(r + h, beta, alpha).f1 - eval_equal_strategy(r - h, beta, alpha).f1) /
                            (2 * h);
          EXPECT_NEAR(equal_strategy_slope(r, beta, alpha), fd, 1e-6);
        }
      }
    }
  }
}
