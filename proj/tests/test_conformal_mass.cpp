#include <gtest/gtest.h>

#include <cmath>

#include "gccf/conformal_mass.hpp"
#include "gccf/pressure.hpp"
#include "oracles.hpp"

using namespace gccf;

TEST(CylinderMass, BoundsBracketTheCoreProduct) {
  const ParameterTau tau(0.0, 1.0);
  const Word w{Letter(1, 1, tau), Letter(2, 1, tau)};
  const auto m = cylinder_mass_bounds(w, 1.5, 2.0);
  const double core = std::pow(2.0, -1.5) * std::pow(5.0, -1.5);
  EXPECT_NEAR(m.lower, core * std::pow(2.0, -3.0), 1e-15);
  EXPECT_NEAR(m.upper, core * std::pow(2.0, 3.0), 1e-15);
  EXPECT_THROW(cylinder_mass_bounds(w, 2.0, 2.0), PreconditionError);
  EXPECT_THROW(cylinder_mass_bounds(w, 1.5, 0.5), PreconditionError);
}

TEST(BallMass, ExactCountDominatesClosedForm) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const double k0 = compute_distortion_constants(tau, 6).k0_empirical;
    const auto c = tau_constants(tau, k0);
    for (double h : {1.1, 1.5, 1.9}) {
      for (int j = 1; j <= 40; ++j) {
        const double r = c.r_small_tau / j;
        const auto exact = ball_mass_lower(tau, h, r, k0, BallMassMode::exact_count);
        const auto closed = ball_mass_lower(tau, h, r, k0, BallMassMode::closed_form);
        EXPECT_GE(exact.value, closed.value) << j;
        EXPECT_EQ(exact.letters, oracle::tau_count(g.u, g.v, k0 / r, c.n_tau * k0 / r));
      }
    }
    EXPECT_THROW(ball_mass_lower(tau, 1.5, 2.0 * c.r_small_tau, k0, BallMassMode::exact_count),
                 RangeError);
  }
}

TEST(Blowup, ClosedRatioMatchesPointsAndGrows) {
  const ParameterTau tau(0.0, 1.0);
  const double k0 = compute_distortion_constants(tau, 6).k0_empirical;
  const auto curve = blowup_curve(tau, 1.5, k0, 300);
  ASSERT_EQ(curve.points.size(), 300u);
  EXPECT_GT(curve.coeff_a, 0.0);
  for (const auto& p : curve.points) {
    EXPECT_NEAR(p.ratio_closed, curve.closed_ratio(p.j), 1e-12 * std::abs(p.ratio_closed) + 1e-300);
    EXPECT_GE(p.exact_count_bound, p.closed_form_bound);
  }
  EXPECT_GT(curve.closed_ratio(curve.crossover_j), 0.0);
  if (curve.crossover_j > 1) {
    EXPECT_LE(curve.closed_ratio(curve.crossover_j - 1), 0.0);
  }
  for (int j = curve.crossover_j; j < 300; ++j) {
    EXPECT_GT(curve.points[static_cast<std::size_t>(j)].ratio_closed,
              curve.points[static_cast<std::size_t>(j - 1)].ratio_closed);
  }
  const auto threaded = blowup_curve(tau, 1.5, k0, 300, ExecPolicy{3});
  for (std::size_t i = 0; i < 300; ++i) {
    EXPECT_EQ(threaded.points[i].exact_count_bound, curve.points[i].exact_count_bound);
  }
}

TEST(MonteCarlo, AgreesWithExhaustiveFraction) {
  const ParameterTau tau(1.0, 1.0);
  MonteCarloOptions o;
  o.samples = 50'000;
  for (auto mode : {Membership::representative, Membership::touching}) {
    o.membership = mode;
    const auto r = montecarlo_cylinder_measure(tau, 1.25, 3, 2, DiskRegion(Complex(0.2, -0.1), 0.15), o);
    ASSERT_TRUE(std::isfinite(r.exact_fraction));
    EXPECT_GT(r.stderr_, 0.0);
    EXPECT_NEAR(r.estimate, r.exact_fraction, 5.0 * r.stderr_ + 1e-3);
    EXPECT_DOUBLE_EQ(r.cylinder_diameter_bound, 0.64);
  }
}

TEST(MonteCarlo, DeterministicForSeedAndThreads) {
  const ParameterTau tau(0.0, 1.0);
  MonteCarloOptions a, b;
  a.samples = b.samples = 10'000;
  b.policy.threads = 4;
  const DiskRegion target(Complex(0.1, 0.0), 0.1);
  const auto ra = montecarlo_cylinder_measure(tau, 1.5, 3, 3, target, a);
  const auto rb = montecarlo_cylinder_measure(tau, 1.5, 3, 3, target, b);
  EXPECT_EQ(ra.estimate, rb.estimate);
  EXPECT_EQ(ra.stderr_, rb.stderr_);
}

TEST(MonteCarlo, BallMassDominatesClosedForm) {
  const ParameterTau tau(0.0, 1.0);
  const double k0 = compute_distortion_constants(tau, 6).k0_empirical;
  const auto br = dimension_bracket(tau, 2, 5, k0);
  const double h = 0.5 * (br.h_low + br.h_high);
  const auto c = tau_constants(tau, k0);
  MonteCarloOptions o;
  o.samples = 40'000;
  o.bootstrap_resamples = 50;
  o.membership = Membership::touching;
  for (int j : {2, 5, 10}) {
    const double r = c.r_small_tau / j;
    const auto mc = montecarlo_cylinder_measure(tau, h, 6, 2, DiskRegion(Complex(0.0, 0.0), r), o);
    const auto closed = ball_mass_lower(tau, h, r, k0, BallMassMode::closed_form);
    EXPECT_GE((mc.estimate + 3.0 * mc.stderr_) / std::pow(r, h), closed.value / std::pow(r, h)) << j;
  }
}

TEST(InteriorWitness, SquareLatticeHandValue) {
  const auto w = interior_witness(ParameterTau(0.0, 1.0));
  const double ref = 0.5 - (std::abs(Complex(2.5, -1.0) / 7.0 - 0.5) + 1.0 / 14.0);
  EXPECT_NEAR(w.margin, ref, 1e-12);
  EXPECT_NEAR(w.margin, 0.2265, 1e-4);
  EXPECT_TRUE(w.boundary_inside);
}

TEST(InteriorWitness, GridMargins) {
  for (const auto& g : oracle::tau_grid()) {
    const auto w = interior_witness(ParameterTau(g.u, g.v));
    EXPECT_GT(w.margin, 0.05);
    EXPECT_TRUE(w.boundary_inside);
  }
}

TEST(SingleLetterCylinders, Disjoint) {
  const ParameterTau tau(0.5, 2.0);
  const auto letters = alphabet(tau, 3);
  for (std::size_t i = 0; i < letters.size(); ++i) {
    for (std::size_t j = i + 1; j < letters.size(); ++j) {
      EXPECT_TRUE(mobius_disk_image(letters[i], interior_x())
                      .interior_disjoint(mobius_disk_image(letters[j], interior_x()), 1e-12));
    }
  }
}
