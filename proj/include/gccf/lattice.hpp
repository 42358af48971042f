#pragma once

// Lattice-point counting for I_tau = { m + n tau : m, n >= 1 } and the
// constants N, L, M, R, r that feed the ball-mass estimate.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "gccf/core.hpp"

namespace gccf {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// E = (1 u; 0 v), F = E^T E = (1 u; u |tau|^2) and the spectral data of F.
struct LatticeMatrices {
  Mat2 e{};
  Mat2 f{};
  double lambda1 = 1.0;  // lambda1 <= lambda2
  double lambda2 = 1.0;
  Mat2 eigvecs{};  // columns are unit eigenvectors for lambda1, lambda2
};

inline LatticeMatrices eigen_data(const ParameterTau& tau) {
  const double u = tau.u(), v = tau.v(), t2 = tau.abs2();
  LatticeMatrices lm;
  lm.e = {{{1.0, u}, {0.0, v}}};
  lm.f = {{{1.0, u}, {u, t2}}};
  const double trace = 1.0 + t2;
  const double disc = std::sqrt((u * u + (v - 1.0) * (v - 1.0)) * (u * u + (v + 1.0) * (v + 1.0)));
  lm.lambda2 = 0.5 * (trace + disc);
  lm.lambda1 = (v * v) / lm.lambda2;
  if (disc == 0.0) {
    lm.eigvecs = {{{1.0, 0.0}, {0.0, 1.0}}};
    return lm;
  }
  // Two candidate eigenvectors for lambda2; take the better-conditioned one.
  double x1 = u, y1 = lm.lambda2 - 1.0;
  double x2 = lm.lambda2 - t2, y2 = u;
  double n1 = std::hypot(x1, y1), n2 = std::hypot(x2, y2);
  double ex = n1 >= n2 ? x1 / n1 : x2 / n2;
  double ey = n1 >= n2 ? y1 / n1 : y2 / n2;
  // v1 is the rotation of v2 by -90 degrees.
  lm.eigvecs = {{{ey, ex}, {-ex, ey}}};
  return lm;
}

struct TauConstants {
  double n_tau = 0.0;
  double l_tau = 0.0;
  double m_tau = 0.0;
  double r_big_tau = 0.0;
  double r_small_tau = 0.0;
};

inline TauConstants tau_constants(const LatticeMatrices& lm, double k0) {
  const double s1 = std::sqrt(lm.lambda1), s2 = std::sqrt(lm.lambda2);
  TauConstants c;
  c.n_tau = std::sqrt(2.0 * lm.lambda2) / s1 + 1.0;
  c.l_tau = c.n_tau * c.n_tau / (2.0 * lm.lambda2) - 1.0 / lm.lambda1;
  c.m_tau = 7.0 * c.n_tau / (2.0 * s2);
  c.r_big_tau = std::max(6.0 * s2 / c.n_tau, 6.0 * s1);
  c.r_small_tau = k0 / c.r_big_tau;
  return c;
}

inline TauConstants tau_constants(const ParameterTau& tau, double k0) {
  return tau_constants(eigen_data(tau), k0);
}

struct CountOptions {
  bool guard_band = false;  // widen squared radii by one ulp
  double row_budget = 1e8;  // rows n = 1..floor(outer/v) + 1 scanned per count
};

namespace detail {

inline double squared_radius(double r, bool guard) {
  const double r2 = r * r;
  return guard ? std::nextafter(r2, std::numeric_limits<double>::infinity()) : r2;
}

inline double lattice_norm2(std::int64_t m, std::int64_t n, double u, double v) {
  const double x = static_cast<double>(m) + static_cast<double>(n) * u;
  const double y = static_cast<double>(n) * v;
  return x * x + y * y;
}

// #{ m >= 1 : |m + n tau|^2 <= limit } (or < limit when strict). The norm is
// increasing in m because m + n u > 0.
inline std::int64_t count_row(std::int64_t n, double u, double v, double limit, bool strict) {
  auto inside = [&](std::int64_t m) {
    const double q = lattice_norm2(m, n, u, v);
    return strict ? q < limit : q <= limit;
  };
  const double y = static_cast<double>(n) * v;
  const double room = limit - y * y;
  if (room < 0.0) return 0;
  auto m = static_cast<std::int64_t>(std::floor(std::sqrt(room) - static_cast<double>(n) * u));
  if (m < 0) m = 0;
  while (m >= 1 && !inside(m)) --m;
  while (inside(m + 1)) ++m;
  return m;
}

}  // namespace detail

/// |I(R)| = #{ (m, n) in N^2 : m^2 + n^2 <= R^2 }, by row sums.
inline std::int64_t count_quadrant_disk(double radius, const CountOptions& opts = {}) {
  if (!(radius > 0.0)) throw PreconditionError("count_quadrant_disk: radius must be positive");
  const double r2 = detail::squared_radius(radius, opts.guard_band);
  std::int64_t total = 0;
  for (std::int64_t m = 1;; ++m) {
    const double m2 = static_cast<double>(m) * static_cast<double>(m);
    if (m2 + 1.0 > r2) break;
    total += detail::count_row(m, 0.0, 1.0, r2, false);
  }
  return total;
}

/// #{ b in I_tau : inner < |b| <= outer }.
inline std::int64_t count_tau_shell_between(const ParameterTau& tau, double inner, double outer,
                                            const CountOptions& opts = {}) {
  const double u = tau.u(), v = tau.v();
  const double out2 = detail::squared_radius(outer, opts.guard_band);
  const double in2 = inner > 0.0 ? detail::squared_radius(inner, false) : 0.0;
  const double rows = std::floor(outer / v) + 1.0;
  if (!(rows <= opts.row_budget)) {
    throw BudgetError("lattice count needs " + std::to_string(rows) +
                      " rows, above the row budget");
  }
  std::int64_t total = 0;
  const auto n_max = static_cast<std::int64_t>(rows);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const std::int64_t upto_outer = detail::count_row(n, u, v, out2, false);
    if (upto_outer == 0) continue;
    total += upto_outer - detail::count_row(n, u, v, in2, false);
  }
  return total;
}

/// |I_tau(r)| = #{ b : K0/r < |b| <= N_tau K0/r }.
inline std::int64_t count_tau_annulus(const ParameterTau& tau, double r, double k0,
                                      const CountOptions& opts = {}) {
  if (!(r > 0.0)) throw PreconditionError("count_tau_annulus: r must be positive");
  const auto c = tau_constants(tau, k0);
  return count_tau_shell_between(tau, k0 / r, c.n_tau * k0 / r, opts);
}

enum class AnnulusKind { d1_prime, d2_prime };

struct AnnulusSpec {
  double r_inner;
  double r_outer;
  AnnulusKind kind;
};

/// D1'(tau, R1, R2) and D2'(R1, R2) as radius pairs; throws if D1' is ill-formed.
inline std::pair<AnnulusSpec, AnnulusSpec> annuli(const LatticeMatrices& lm, double r1, double r2) {
  const AnnulusSpec d1{r1 / std::sqrt(lm.lambda1), r2 / std::sqrt(lm.lambda2),
                       AnnulusKind::d1_prime};
  if (!(r1 > 0.0) || !(d1.r_inner < d1.r_outer)) {
    throw PreconditionError("annulus requires R1/sqrt(lambda1) < R2/sqrt(lambda2)");
  }
  return {d1, AnnulusSpec{r1, r2, AnnulusKind::d2_prime}};
}

struct AnnulusInclusionReport {
  std::int64_t source_points = 0;  // |N^2 cap D1'|
  std::int64_t target_points = 0;  // |I_tau cap D2'|
  std::int64_t violations = 0;
  double inner_margin = std::numeric_limits<double>::infinity();  // min |E p|^2 - R1^2
  double outer_margin = std::numeric_limits<double>::infinity();  // min R2^2 - |E p|^2
  [[nodiscard]] bool ok() const noexcept {
    return violations == 0 && source_points <= target_points;
  }
};

/// Maps every lattice point of D1' through E and checks that it lands in D2'.
inline AnnulusInclusionReport verify_annulus_inclusion(const ParameterTau& tau, double r1, double r2) {
  const auto lm = eigen_data(tau);
  const auto [d1, d2] = annuli(lm, r1, r2);
  const double in2 = r1 * r1 / lm.lambda1;
  const double out2 = r2 * r2 / lm.lambda2;
  const double t_in2 = r1 * r1, t_out2 = r2 * r2;
  AnnulusInclusionReport rep;
  const auto m_max = static_cast<std::int64_t>(std::floor(d1.r_outer));
  for (std::int64_t m = 1; m <= m_max; ++m) {
    for (std::int64_t n = 1; n <= m_max; ++n) {
      const double q = static_cast<double>(m * m + n * n);
      if (q > out2) break;
      if (!(q > in2)) continue;
      ++rep.source_points;
      const double image = detail::lattice_norm2(m, n, tau.u(), tau.v());
      rep.inner_margin = std::min(rep.inner_margin, image - t_in2);
      rep.outer_margin = std::min(rep.outer_margin, t_out2 - image);
      if (!(image > t_in2 && image <= t_out2)) ++rep.violations;
    }
  }
  rep.target_points = count_tau_shell_between(tau, d2.r_inner, d2.r_outer);
  return rep;
}

/// |N^2 cap D1(tau, R)| with D1(tau, R) = D1'(tau, R, N_tau R).
inline std::int64_t count_d1(const ParameterTau& tau, double radius) {
  const auto lm = eigen_data(tau);
  const auto c = tau_constants(lm, 1.0);
  return count_quadrant_disk(c.n_tau * radius / std::sqrt(lm.lambda2)) -
         count_quadrant_disk(radius / std::sqrt(lm.lambda1));
}

/// L_tau R^2 - M_tau R, valid for R >= R_tau.
inline double annulus_lower_bound(const ParameterTau& tau, double radius) {
  const auto c = tau_constants(tau, 1.0);
  if (radius < c.r_big_tau) {
    throw PreconditionError("annulus_lower_bound: R = " + std::to_string(radius) +
                            " is below R_tau = " + std::to_string(c.r_big_tau));
  }
  return c.l_tau * radius * radius - c.m_tau * radius;
}

}  // namespace gccf
