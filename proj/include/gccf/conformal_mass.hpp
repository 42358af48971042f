#pragma once

// Lower bounds for the h-conformal measure of cylinders and of balls B(0, r),
// the blow-up sequence r_j = r_tau / j, a Monte-Carlo cylinder approximation
// of the measure, and the interior witness phi_{2+tau}(X) in Int(X).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gccf/core.hpp"
#include "gccf/detail/parallel.hpp"
#include "gccf/detail/rng.hpp"
#include "gccf/detail/summation.hpp"
#include "gccf/lattice.hpp"

namespace gccf {

namespace detail {

inline void require_dimension_range(double h) {
  if (!(h > 1.0 && h < 2.0)) throw PreconditionError("h must lie in (1, 2)");
}

}  // namespace detail

struct CylinderMass {
  Word word;
  double lower;
  double upper;
};

/// k0^{-h|w|} prod |b_i|^{-2h} <= m(phi_w(X)) <= k0^{h|w|} prod |b_i|^{-2h}.
inline CylinderMass cylinder_mass_bounds(const Word& w, double h, double k0) {
  detail::require_dimension_range(h);
  if (!(k0 >= 1.0)) throw PreconditionError("cylinder_mass_bounds: k0 must be >= 1");
  double log_core = 0.0;
  for (const auto& b : w) log_core -= h * std::log(b.norm2());
  const double spread = h * static_cast<double>(w.size()) * std::log(k0);
  return {w, std::exp(log_core - spread), std::exp(log_core + spread)};
}

enum class BallMassMode { exact_count, closed_form };

struct BallMassValue {
  double value = 0.0;
  bool negative = false;  // closed form below zero (reported as-is)
  std::int64_t letters = 0;
};

inline BallMassValue ball_mass_lower(const ParameterTau& tau, double h, double r, double k0,
                                     BallMassMode mode, const CountOptions& counting = {}) {
  detail::require_dimension_range(h);
  const auto c = tau_constants(tau, k0);
  if (!(r > 0.0)) throw PreconditionError("ball_mass_lower: r must be positive");
  if (r > c.r_small_tau * (1.0 + 1e-12)) {
    throw RangeError("ball_mass_lower: r = " + std::to_string(r) + " exceeds r_tau = " +
                     std::to_string(c.r_small_tau));
  }
  BallMassValue out;
  const double scale = std::pow(c.n_tau, -2.0 * h);
  if (mode == BallMassMode::exact_count) {
    out.letters = count_tau_annulus(tau, r, k0, counting);
    out.value = static_cast<double>(out.letters) * std::pow(k0, -3.0 * h) * scale *
                std::pow(r, 2.0 * h);
  } else {
    out.value = c.l_tau * std::pow(k0, 2.0 - 3.0 * h) * scale * std::pow(r, 2.0 * h - 2.0) -
                c.m_tau * std::pow(k0, 1.0 - 3.0 * h) * scale * std::pow(r, 2.0 * h - 1.0);
    out.negative = out.value < 0.0;
  }
  return out;
}

struct BallMassPoint {
  int j = 0;
  double r = 0.0;
  std::int64_t letters = 0;
  double exact_count_bound = 0.0;
  double closed_form_bound = 0.0;
  double ratio_exact = 0.0;   // exact_count_bound / r^h
  double ratio_closed = 0.0;  // closed_form_bound / r^h
};

struct BlowupCurve {
  double h = 0.0;
  double k0 = 0.0;
  double coeff_a = 0.0;  // ratio_closed(j) = A j^{2-h} - B j^{1-h}
  double coeff_b = 0.0;
  int crossover_j = 0;   // first j with ratio_closed(j) > 0
  std::vector<BallMassPoint> points;

  [[nodiscard]] double closed_ratio(double j) const noexcept {
    return coeff_a * std::pow(j, 2.0 - h) - coeff_b * std::pow(j, 1.0 - h);
  }
};

inline BlowupCurve blowup_curve(const ParameterTau& tau, double h, double k0, int j_max,
                                const ExecPolicy& policy = {}) {
  detail::require_dimension_range(h);
  if (j_max < 2) throw PreconditionError("blowup_curve: j_max must be >= 2");
  const auto c = tau_constants(tau, k0);
  BlowupCurve curve;
  curve.h = h;
  curve.k0 = k0;
  const double scale = std::pow(c.n_tau, -2.0 * h);
  curve.coeff_a = c.l_tau * std::pow(k0, 2.0 - 3.0 * h) * scale * std::pow(c.r_small_tau, h - 2.0);
  curve.coeff_b = c.m_tau * std::pow(k0, 1.0 - 3.0 * h) * scale * std::pow(c.r_small_tau, h - 1.0);
  // A j^{2-h} > B j^{1-h}  <=>  j > B / A.
  curve.crossover_j = static_cast<int>(std::floor(curve.coeff_b / curve.coeff_a)) + 1;
  while (curve.crossover_j > 1 && curve.closed_ratio(curve.crossover_j - 1) > 0.0) {
    --curve.crossover_j;
  }
  while (!(curve.closed_ratio(curve.crossover_j) > 0.0)) ++curve.crossover_j;

  curve.points.resize(static_cast<std::size_t>(j_max));
  detail::parallel_for(static_cast<std::size_t>(j_max), policy, [&](std::size_t i) {
    BallMassPoint pt;
    pt.j = static_cast<int>(i) + 1;
    pt.r = c.r_small_tau / pt.j;
    const auto exact = ball_mass_lower(tau, h, pt.r, k0, BallMassMode::exact_count);
    const auto closed = ball_mass_lower(tau, h, pt.r, k0, BallMassMode::closed_form);
    pt.letters = exact.letters;
    pt.exact_count_bound = exact.value;
    pt.closed_form_bound = closed.value;
    const double rh = std::pow(pt.r, h);
    pt.ratio_exact = exact.value / rh;
    pt.ratio_closed = closed.value / rh;
    curve.points[i] = pt;
  });
  return curve;
}

// ---------------------------------------------------------------------------
// Monte-Carlo cylinder measure

enum class Membership {
  representative,  // phi_w(1/2) lies in the target
  touching,        // the exact cylinder disk phi_w(X) meets the target
};

struct MonteCarloOptions {
  std::uint64_t samples = 200'000;
  std::uint64_t seed = detail::kDefaultSeed;
  Membership membership = Membership::representative;
  int bootstrap_resamples = 200;
  std::uint64_t exact_word_budget = 10'000'000;
  ExecPolicy policy{};
};

struct MonteCarloResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  // Exhaustive weighted fraction over all of K'(P)^n, NaN when over budget.
  double exact_fraction = std::numeric_limits<double>::quiet_NaN();
  double cylinder_diameter_bound = 0.0;  // (4/5)^n
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::uint64_t kMonteCarloBatch = 4096;

inline bool target_hit(const MobiusMatrix& mat, const DiskRegion& target, Membership mode) {
  const Complex point = mat(Complex(0.5, 0.0));
  if (target.contains(point)) return true;
  if (mode == Membership::representative) return false;
  const DiskRegion cylinder = mobius_disk_image(mat, unit_disk_x());
  return std::abs(cylinder.center - target.center) <= target.radius + cylinder.radius;
}

}  // namespace detail

/// Approximates the h-conformal measure of the finite subsystem K'(P) by
/// cylinder weights |phi_w'(1/2)|^h at depth n, each placed at phi_w(1/2),
/// and estimates the weight fraction inside `target` by self-normalised
/// importance sampling with letters drawn proportionally to |phi_b'(1/2)|^h.
inline MonteCarloResult montecarlo_cylinder_measure(const ParameterTau& tau, double h,
                                                    int truncation_p, int depth_n,
                                                    const DiskRegion& target,
                                                    const MonteCarloOptions& opts = {}) {
  if (!(h > 0.0)) throw PreconditionError("montecarlo: h must be positive");
  if (depth_n < 1 || truncation_p < 1) throw PreconditionError("montecarlo: bad depth/truncation");
  if (opts.samples < 2) throw PreconditionError("montecarlo: need at least 2 samples");
  const auto letters = alphabet(tau, truncation_p);
  std::vector<double> proposal(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) {
    proposal[i] = std::pow(map_derivative_abs(letters[i], Complex(0.5, 0.0)), h);
  }
  std::vector<double> cumulative(proposal.size());
  {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < proposal.size(); ++i) {
      s.add(proposal[i]);
      cumulative[i] = s.value();
    }
  }
  const double z_letters = cumulative.back();

  MonteCarloResult res;
  res.samples = opts.samples;
  res.seed = opts.seed;
  res.cylinder_diameter_bound = std::pow(0.8, depth_n);

  const std::uint64_t batches = (opts.samples + detail::kMonteCarloBatch - 1) / detail::kMonteCarloBatch;
  std::vector<double> weight(opts.samples), hit(opts.samples);
  detail::parallel_for(batches, opts.policy, [&](std::size_t batch) {
    detail::Rng rng(detail::derive_seed(opts.seed, batch));
    const std::uint64_t begin = batch * detail::kMonteCarloBatch;
    const std::uint64_t end = std::min<std::uint64_t>(opts.samples, begin + detail::kMonteCarloBatch);
    for (std::uint64_t s = begin; s < end; ++s) {
      MobiusMatrix mat;
      double log_q = 0.0;
      for (int k = 0; k < depth_n; ++k) {
        const double x = rng.uniform() * z_letters;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        if (it == cumulative.end()) --it;
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        log_q += std::log(proposal[idx]);
        mat.append(letters[idx]);
      }
      const double log_target = -h * std::log(std::norm(0.5 * mat.c + mat.d));
      weight[s] = std::exp(log_target - log_q);
      hit[s] = detail::target_hit(mat, target, opts.membership) ? 1.0 : 0.0;
    }
  });

  auto ratio = [&](auto&& index_of) {
    detail::CompensatedSum num, den;
    for (std::uint64_t i = 0; i < opts.samples; ++i) {
      const auto k = index_of(i);
      num.add(weight[k] * hit[k]);
      den.add(weight[k]);
    }
    return num.value() / den.value();
  };
  res.estimate = ratio([](std::uint64_t i) { return i; });

  if (opts.bootstrap_resamples > 1) {
    detail::Rng boot(detail::derive_seed(opts.seed, ~std::uint64_t{0}));
    detail::CompensatedSum m1, m2;
    for (int b = 0; b < opts.bootstrap_resamples; ++b) {
      std::vector<std::uint64_t> idx(opts.samples);
      for (auto& k : idx) k = boot.below(opts.samples);
      const double e = ratio([&](std::uint64_t i) { return idx[i]; });
      m1.add(e);
      m2.add(e * e);
    }
    const double nb = opts.bootstrap_resamples;
    const double mean = m1.value() / nb;
    res.stderr_ = std::sqrt(std::max(0.0, (m2.value() / nb - mean * mean) * nb / (nb - 1.0)));
  }

  const double words = std::pow(static_cast<double>(letters.size()), depth_n);
  if (words <= static_cast<double>(opts.exact_word_budget)) {
    detail::CompensatedSum num, den;
    std::vector<std::size_t> digits(static_cast<std::size_t>(depth_n), 0);
    const auto total = static_cast<std::uint64_t>(words);
    for (std::uint64_t w = 0; w < total; ++w) {
      std::uint64_t rem = w;
      for (int k = depth_n - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = rem % letters.size();
        rem /= letters.size();
      }
      MobiusMatrix mat;
      for (auto d : digits) mat.append(letters[d]);
      const double wt = std::pow(std::norm(0.5 * mat.c + mat.d), -h);
      den.add(wt);
      if (detail::target_hit(mat, target, opts.membership)) num.add(wt);
    }
    res.exact_fraction = num.value() / den.value();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Interior witness

struct InteriorWitness {
  DiskRegion image;
  double margin;
  int boundary_samples;
  bool boundary_inside;  // all sampled boundary images strictly inside X
};

/// phi_{2+tau}(X) lies strictly inside Int(X); returns the inclusion margin.
inline InteriorWitness interior_witness(const ParameterTau& tau, int boundary_samples = 256) {
  const Letter b2(2, 1, tau);
  const DiskRegion x = unit_disk_x();
  InteriorWitness out{mobius_disk_image(b2, x), 0.0, boundary_samples, true};
  out.margin = x.inclusion_margin(out.image);
  for (int k = 0; k < boundary_samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / boundary_samples;
    const Complex z = x.center + std::polar(x.radius, theta);
    if (!(std::abs(apply_map(b2, z) - x.center) < x.radius)) out.boundary_inside = false;
  }
  if (!(out.margin > 0.0)) {
    throw DomainError("interior_witness: nonpositive margin " + std::to_string(out.margin));
  }
  return out;
}

}  // namespace gccf
