#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gccf/core.hpp"
#include "oracles.hpp"

using namespace gccf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex random_point_in_x(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return Complex(0.5, 0.0) + std::polar(0.5 * std::sqrt(unit(gen)), kTwoPi * unit(gen));
}

}  // namespace

TEST(ParameterTau, RejectsPointsOutsideA0) {
  EXPECT_THROW(ParameterTau(-0.1, 1.0), PreconditionError);
  EXPECT_THROW(ParameterTau(0.0, 0.5), PreconditionError);
  EXPECT_THROW(ParameterTau(NAN, 2.0), PreconditionError);
  EXPECT_NO_THROW(ParameterTau(0.0, 1.0));
}

TEST(Letter, ValueAndValidation) {
  const ParameterTau tau(0.5, 2.0);
  const Letter b(3, 2, tau);
  EXPECT_DOUBLE_EQ(b.value().real(), 4.0);
  EXPECT_DOUBLE_EQ(b.value().imag(), 4.0);
  EXPECT_DOUBLE_EQ(b.norm2(), 32.0);
  EXPECT_THROW(Letter(0, 1, tau), PreconditionError);
  EXPECT_THROW(Letter(1, 0, tau), PreconditionError);
  EXPECT_THROW(Word(std::vector<Letter>{}), PreconditionError);
}

TEST(Maps, HandValues) {
  const ParameterTau tau(0.0, 1.0);
  const Letter b(1, 1, tau);
  const Complex w = apply_map(b, Complex(0.0, 0.0));
  EXPECT_NEAR(w.real(), 0.5, 1e-15);
  EXPECT_NEAR(w.imag(), -0.5, 1e-15);
  EXPECT_NEAR(map_derivative_abs(b, Complex(0.0, 0.0)), 0.5, 1e-15);
  EXPECT_THROW(apply_map(b, -b.value()), DomainError);
}

TEST(Maps, WordMatchesMobiusMatrix) {
  std::mt19937_64 gen(7);
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto letters = alphabet(tau, 3);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Letter> ls;
      for (int k = 0; k < 1 + trial % 5; ++k) ls.push_back(letters[pick(gen)]);
      const Word w(ls);
      const auto mat = word_mobius(w);
      const Complex z = random_point_in_x(gen);
      EXPECT_LT(std::abs(word_apply(w, z) - mat(z)), 1e-14);
      const double d = word_derivative_abs(w, z);
      EXPECT_NEAR(d, 1.0 / std::norm(mat.c * z + mat.d), 1e-12 * d);
    }
  }
}

TEST(Maps, DerivativeMatchesCentralDifference) {
  std::mt19937_64 gen(11);
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto letters = alphabet(tau, 4);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<Letter> ls;
      std::vector<Complex> raw;
      for (int k = 0; k < 1 + trial % 5; ++k) {
        ls.push_back(letters[pick(gen)]);
        raw.push_back(ls.back().value());
      }
      const Complex z = random_point_in_x(gen);
      const double exact = word_derivative_abs(Word(ls), z);
      EXPECT_NEAR(oracle::central_difference(raw, z, 1e-6), exact, 1e-5 * exact);
    }
  }
}

TEST(Maps, DerivativeExtremaOnX) {
  std::mt19937_64 gen(3);
  const ParameterTau tau(1.0, 1.0);
  const auto letters = alphabet(tau, 2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Letter> ls;
    for (int k = 0; k < 3; ++k) ls.push_back(letters[gen() % letters.size()]);
    const Word w(ls);
    const auto ext = word_derivative_extrema_on_x(w);
    double lo = INFINITY, hi = 0.0;
    for (int k = 0; k < 4096; ++k) {
      const double d = word_derivative_abs(w, Complex(0.5, 0.0) + std::polar(0.5, kTwoPi * k / 4096));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    // Sampled boundary extremes lie inside the exact ones and are close to them.
    EXPECT_LE(hi, std::exp(ext.log_sup) * (1 + 1e-12));
    EXPECT_GE(lo, std::exp(ext.log_inf) * (1 - 1e-12));
    EXPECT_NEAR(std::log(hi), ext.log_sup, 1e-5);
    EXPECT_NEAR(std::log(lo), ext.log_inf, 1e-5);
  }
}

TEST(DiskImage, MatchesMappedBoundary) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    for (const auto& b : alphabet(tau, 3)) {
      const auto img = mobius_disk_image(b, unit_disk_x());
      const auto ref = oracle::circumcircle(apply_map(b, Complex(0.0, 0.0)),
                                            apply_map(b, Complex(1.0, 0.0)),
                                            apply_map(b, Complex(0.5, 0.5)));
      EXPECT_LT(std::abs(img.center - ref.center), 1e-13);
      EXPECT_NEAR(img.radius, ref.radius, 1e-13);
      for (int k = 0; k < 64; ++k) {
        const Complex z = Complex(0.5, 0.0) + std::polar(0.5, kTwoPi * k / 64);
        EXPECT_NEAR(std::abs(apply_map(b, z) - img.center), img.radius, 1e-13);
      }
    }
  }
}

TEST(DiskImage, MatrixFormAgreesWithLetterChain) {
  const ParameterTau tau(0.5, 2.0);
  const auto letters = alphabet(tau, 2);
  const Word w{letters[0], letters[3], letters[7]};
  const auto chain = word_disk_image(w, unit_disk_x());
  const auto direct = mobius_disk_image(word_mobius(w), unit_disk_x());
  EXPECT_LT(std::abs(chain.center - direct.center), 1e-15);
  EXPECT_NEAR(chain.radius, direct.radius, 1e-15);
}

TEST(DiskImage, DegenerateWhenPoleInside) {
  const ParameterTau tau(0.0, 1.0);
  EXPECT_THROW(mobius_disk_image(Letter(1, 1, tau), DiskRegion(Complex(-1.0, -1.0), 0.5)),
               DegenerateDiskError);
}

TEST(Shells, SizesMatchEnumeration) {
  for (int p = 1; p <= 10; ++p) EXPECT_EQ(shell_size(p), oracle::shell_count(p)) << p;
  EXPECT_EQ(shell_size(1), 1);
  EXPECT_EQ(shell_size(2), 8);
  EXPECT_EQ(shell_size(3), 40);
  EXPECT_EQ(shell_size(4), 176);
  EXPECT_EQ(alphabet_size(5), 31 * 31);
  const ParameterTau tau(2.0, 3.0);
  for (int p = 1; p <= 6; ++p) {
    const auto ls = shell_letters(tau, p);
    ASSERT_EQ(static_cast<std::int64_t>(ls.size()), shell_size(p));
    for (const auto& b : ls) EXPECT_EQ(std::max(b.m(), b.n()) >> (p - 1), 1);
  }
}

TEST(SystemAxioms, ForwardInvarianceAndContraction) {
  std::mt19937_64 gen(5);
  const auto x = unit_disk_x();
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto letters = alphabet(tau, 6);
    for (const auto& b : letters) {
      EXPECT_GE(x.inclusion_margin(mobius_disk_image(b, x)), -1e-15);
    }
    for (int i = 0; i < 1000; ++i) {
      const auto& b = letters[gen() % letters.size()];
      const Complex z = random_point_in_x(gen), w = random_point_in_x(gen);
      EXPECT_TRUE(x.contains(apply_map(b, z), 1e-15));
      EXPECT_LE(std::abs(apply_map(b, z) - apply_map(b, w)), 0.8 * std::abs(z - w) + 1e-15);
      EXPECT_GE(std::norm(z + b.value()), 1.25 - 1e-12);
    }
  }
}

TEST(SystemAxioms, OpenSetConditionOnLowShells) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    std::vector<DiskRegion> imgs;
    for (const auto& b : alphabet(tau, 4)) imgs.push_back(mobius_disk_image(b, interior_x()));
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      for (std::size_t j = i + 1; j < imgs.size(); ++j) {
        ASSERT_TRUE(imgs[i].interior_disjoint(imgs[j], 1e-12)) << i << ' ' << j;
      }
    }
  }
}

TEST(Distortion, KoebeConstantAtDefaultEpsilon) {
  const auto k = compute_distortion_constants(ParameterTau(0.0, 1.0), 4);
  EXPECT_DOUBLE_EQ(k.r0, 13.0 / 24.0);
  EXPECT_DOUBLE_EQ(k.r1, 25.0 / 48.0);
  EXPECT_NEAR(k.koebe_c, 6765201.0, 1e-3);
  EXPECT_NEAR(k.koebe_c1, 51.0 * 26.0 * 26.0, 1e-6);
  EXPECT_GE(k.k0_rigorous, k.koebe_c);
  EXPECT_GE(k.k0_rigorous, k.m_rigorous);
  EXPECT_THROW(koebe_bounds(1.0), PreconditionError);
}

TEST(Distortion, EmpiricalConstantCoversLetterInequalities) {
  for (const auto& g : oracle::tau_grid()) {
    const ParameterTau tau(g.u, g.v);
    const auto k = compute_distortion_constants(tau, 6);
    EXPECT_GE(k.k0_empirical, 1.0);
    EXPECT_TRUE(k.shell_scan_monotone);
    for (const double k0 : {k.k0_empirical, k.k0_rigorous}) {
      // A denser grid over the whole of V than the one used for the fit.
      for (const auto& b : alphabet(tau, 6)) {
        double lo = INFINITY, hi = 0.0;
        for (int ring = 1; ring <= 4; ++ring) {
          for (int a = 0; a < 720; ++a) {
            const Complex z = Complex(0.5, 0.0) + std::polar(k.r1 * ring / 4.0, kTwoPi * a / 720);
            const double d = std::abs(z + b.value());
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            EXPECT_LE(std::abs(1.0 / (z + b.value())), k0 / b.abs() * (1 + 1e-12));
          }
        }
        const double nb2 = b.norm2();
        EXPECT_LE(1.0 / (lo * lo), k0 / nb2 * (1 + 1e-12));
        EXPECT_GE(1.0 / (hi * hi), 1.0 / (k0 * nb2) * (1 - 1e-12));
        EXPECT_LE((hi / lo) * (hi / lo), k0 * (1 + 1e-12));
      }
    }
  }
}

TEST(Distortion, RejectsBadOptions) {
  DistortionOptions o;
  o.epsilon = 0.1;
  EXPECT_THROW(compute_distortion_constants(ParameterTau(0, 1), 4, o), PreconditionError);
  EXPECT_THROW(compute_distortion_constants(ParameterTau(0, 1), 0), PreconditionError);
}
