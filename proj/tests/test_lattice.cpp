#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gccf/lattice.hpp"
#include "oracles.hpp"

using namespace gccf;

TEST(QuadrantCount, SpotValuesAgainstDoubleLoop) {
  EXPECT_EQ(count_quadrant_disk(6.0), 22);
  EXPECT_EQ(count_quadrant_disk(10.0), 69);
  for (double r = 1.0; r <= 80.0; r += 0.37) {
    EXPECT_EQ(count_quadrant_disk(r), oracle::quadrant_count(r)) << r;
  }
  // Radii landing exactly on lattice points count the boundary.
  EXPECT_EQ(count_quadrant_disk(5.0), oracle::quadrant_count(5.0));
  EXPECT_EQ(count_quadrant_disk(std::sqrt(2.0)), 1);
  EXPECT_THROW(count_quadrant_disk(0.0), PreconditionError);
}

TEST(QuadrantCount, LatticePointBounds) {
  for (double r = 6.0; r <= 500.0; r += 0.5) {
    const auto c = static_cast<double>(count_quadrant_disk(r));
    ASSERT_LE((r * r - 7.0 * r + 7.0) / 2.0, c) << r;
    ASSERT_LE(c, r * r) << r;
  }
  const double density = static_cast<double>(count_quadrant_disk(500.0)) / (500.0 * 500.0);
  EXPECT_NEAR(density, std::numbers::pi / 4.0, 0.01);
}

TEST(TauCount, ShellAgainstBoxScan) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    for (auto [in, out] : {std::pair{0.0, 10.0}, {3.0, 17.5}, {12.25, 40.0}, {7.0, 7.5}}) {
      EXPECT_EQ(count_tau_shell_between(tau, in, out), oracle::tau_count(g.u, g.v, in, out))
          << g.u << "+" << g.v << "i " << in << ".." << out;
    }
  }
}

TEST(TauCount, RowBudget) {
  CountOptions opts;
  opts.row_budget = 10;
  EXPECT_THROW(count_tau_shell_between(ParameterTau(0, 1), 1.0, 100.0, opts), BudgetError);
}

TEST(EigenData, CharacteristicPolynomial) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto lm = eigen_data(tau);
    const double trace = 1.0 + tau.abs2(), det = g.v * g.v;
    EXPECT_NEAR(lm.lambda1 + lm.lambda2, trace, 1e-12 * trace);
    EXPECT_NEAR(lm.lambda1 * lm.lambda2, det, 1e-12 * det);
    EXPECT_LE(lm.lambda1, lm.lambda2);
    for (int k = 0; k < 2; ++k) {
      const double lam = k == 0 ? lm.lambda1 : lm.lambda2;
      const double x = lm.eigvecs[0][k], y = lm.eigvecs[1][k];
      EXPECT_NEAR(std::hypot(x, y), 1.0, 1e-12);
      EXPECT_LE(std::hypot(lm.f[0][0] * x + lm.f[0][1] * y - lam * x,
                           lm.f[1][0] * x + lm.f[1][1] * y - lam * y),
                1e-10);
    }
  }
}

TEST(EigenData, HandValues) {
  const auto i = eigen_data(ParameterTau(0.0, 1.0));
  EXPECT_DOUBLE_EQ(i.lambda1, 1.0);
  EXPECT_DOUBLE_EQ(i.lambda2, 1.0);
  const auto one_i = eigen_data(ParameterTau(1.0, 1.0));
  EXPECT_NEAR(one_i.lambda1, (3.0 - std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_NEAR(one_i.lambda2, (3.0 + std::sqrt(5.0)) / 2.0, 1e-14);
}

TEST(TauConstants, SquareLatticeWithUnitK0) {
  const auto c = tau_constants(ParameterTau(0.0, 1.0), 1.0);
  const double n = std::sqrt(2.0) + 1.0;
  EXPECT_NEAR(c.n_tau, n, 1e-14);
  EXPECT_NEAR(c.l_tau, n * n / 2.0 - 1.0, 1e-14);
  EXPECT_NEAR(c.m_tau, 3.5 * n, 1e-14);
  EXPECT_NEAR(c.n_tau, 2.41421, 1e-5);
  EXPECT_NEAR(c.l_tau, 1.91421, 1e-5);
  EXPECT_NEAR(c.m_tau, 8.44975, 1e-5);
  EXPECT_DOUBLE_EQ(c.r_big_tau, 6.0);
  EXPECT_DOUBLE_EQ(c.r_small_tau, 1.0 / 6.0);
}

TEST(TauConstants, AnnulusWellFormed) {
  for (const auto& g : oracle::tau_grid()) {
    const auto lm = eigen_data(ParameterTau(g.u, g.v));
    const auto c = tau_constants(lm, 1.0);
    EXPECT_LT(1.0 / std::sqrt(lm.lambda1), c.n_tau / std::sqrt(lm.lambda2));
    EXPECT_GT(c.l_tau, 0.0);
  }
}

TEST(Annulus, InclusionOnGrid) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto lm = eigen_data(tau);
    for (auto [r1, r2] : {std::pair{5.0, 40.0}, {8.0, 80.0}, {10.0, 120.0}}) {
      if (!(r1 / std::sqrt(lm.lambda1) < r2 / std::sqrt(lm.lambda2))) {
        EXPECT_THROW(annuli(lm, r1, r2), PreconditionError);
        continue;
      }
      const auto rep = verify_annulus_inclusion(tau, r1, r2);
      EXPECT_TRUE(rep.ok()) << g.u << "+" << g.v << "i";
      EXPECT_EQ(rep.violations, 0);
      EXPECT_GT(rep.source_points, 0);
    }
  }
}

TEST(Annulus, D1CountMatchesLowerBound) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto c = tau_constants(tau, 1.0);
    for (double k = 1.0; k <= 30.0; k += 1.0) {
      const double radius = k * c.r_big_tau;
      EXPECT_GE(static_cast<double>(count_d1(tau, radius)), annulus_lower_bound(tau, radius));
    }
    EXPECT_THROW(annulus_lower_bound(tau, 0.5 * c.r_big_tau), PreconditionError);
  }
}

TEST(Annulus, TauCountLowerBound) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    for (const double k0 : {1.0, 2.5, 40.0}) {
      const auto c = tau_constants(tau, k0);
      for (int j = 1; j <= 20; ++j) {
        const double r = c.r_small_tau / j;
        const double exact = static_cast<double>(count_tau_annulus(tau, r, k0));
        EXPECT_GE(exact, c.l_tau * k0 * k0 / (r * r) - c.m_tau * k0 / r);
      }
    }
  }
}
