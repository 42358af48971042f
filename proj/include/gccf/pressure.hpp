#pragma once

// Psi-series over shells, their closed-form bounds, n-level pressure brackets
// and the resulting enclosure of the dimension h_tau.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gccf/core.hpp"
#include "gccf/detail/parallel.hpp"
#include "gccf/detail/summation.hpp"

namespace gccf {

inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// First-level series sum_b |b|^{-2t}

/// Exact sum over K'(P) of |b|^{-2t}, shell-major and row-major within a shell.
inline double shell_psi1_partial(const ParameterTau& tau, double t, int truncation_p) {
  if (truncation_p < 1 || truncation_p > 16) {
    throw PreconditionError("shell_psi1_partial: truncation_p must lie in [1, 16]");
  }
  if (t < 0.0) throw PreconditionError("shell_psi1_partial: t must be >= 0");
  const double u = tau.u(), v = tau.v();
  detail::CompensatedSum total;
  for (int p = 1; p <= truncation_p; ++p) {
    const std::int64_t lo = std::int64_t{1} << (p - 1);
    const std::int64_t hi = (std::int64_t{1} << p) - 1;
    detail::CompensatedSum shell;
    for (std::int64_t m = 1; m <= hi; ++m) {
      const std::int64_t n_start = m >= lo ? 1 : lo;
      for (std::int64_t n = n_start; n <= hi; ++n) {
        const double x = static_cast<double>(m) + static_cast<double>(n) * u;
        const double y = static_cast<double>(n) * v;
        shell.add(t == 1.0 ? 1.0 / (x * x + y * y) : std::pow(x * x + y * y, -t));
      }
    }
    total.add(shell.value());
  }
  return total.value();
}

namespace detail {

// 3 sum_{p > from} 4^{(p-1)(1-t)} min{1 + |tau|^2/4^{p-1}, |tau|^2}^{-t}.
// Terms past p = from + 64 use min{...} >= 1 and are summed geometrically, so
// the result stays an upper bound.
inline double upper_series_from(const ParameterTau& tau, double t, int from) {
  if (t <= 1.0) return kDivergent;
  const double t2 = tau.abs2();
  const double q = std::pow(4.0, 1.0 - t);
  CompensatedSum s;
  const int last = from + 64;
  for (int p = from + 1; p <= last; ++p) {
    const double scale = std::ldexp(1.0, 2 * (p - 1));
    const double mn = std::min(1.0 + t2 / scale, t2);
    s.add(3.0 * std::pow(q, p - 1) * std::pow(mn, -t));
  }
  s.add(3.0 * std::pow(q, last) / (1.0 - q));
  return s.value();
}

}  // namespace detail

inline double psi1_upper_bound(const ParameterTau& tau, double t) {
  return detail::upper_series_from(tau, t, 0);
}

/// Upper series restricted to shells p > truncation_p.
inline double psi1_upper_tail(const ParameterTau& tau, double t, int truncation_p) {
  return detail::upper_series_from(tau, t, truncation_p);
}

/// (1/4) sum_{p >= 1} 4^{p(1-t)} (1 + |tau|)^{-2t}, in closed form.
inline double psi1_lower_bound(const ParameterTau& tau, double t) {
  if (t <= 1.0) return kDivergent;
  const double q = std::pow(4.0, 1.0 - t);
  return 0.25 * std::pow(1.0 + tau.abs(), -2.0 * t) * q / (1.0 - q);
}

/// Lower series over shells p > truncation_p.
inline double psi1_lower_tail(const ParameterTau& tau, double t, int truncation_p) {
  if (t <= 1.0) return kDivergent;
  const double q = std::pow(4.0, 1.0 - t);
  return 0.25 * std::pow(1.0 + tau.abs(), -2.0 * t) * std::pow(q, truncation_p + 1) / (1.0 - q);
}

// ---------------------------------------------------------------------------
// Word tables: per-word log-derivative data for K'(P)^n

struct WordTableOptions {
  std::uint64_t word_budget = 10'000'000;
  // Prefixes whose log sup_X |phi_u'| falls below this are not expanded.
  double prune_log_sup = -std::numeric_limits<double>::infinity();
  ExecPolicy policy{};
};

struct PrunedPrefix {
  double log_sup;
  int remaining;
};

/// Words of K'(P)^n in lexicographic order (canonical letter order).
struct WordTable {
  int depth_n = 0;
  int truncation_p = 0;
  std::vector<double> log_x0;   // log |phi_w'(1/2)|
  std::vector<double> log_sup;  // log sup_X |phi_w'|
  std::vector<double> log_inf;  // log inf_X |phi_w'|
  std::vector<PrunedPrefix> pruned;
  std::vector<double> letter_log_sup;  // single letters of K'(P)
  std::vector<double> letter_log_inf;
  std::vector<double> letter_log_abs2;  // log |b|^2

  [[nodiscard]] std::size_t size() const noexcept { return log_x0.size(); }
};

namespace detail {

struct WordChunk {
  std::vector<double> log_x0, log_sup, log_inf;
  std::vector<PrunedPrefix> pruned;
};

inline void expand_words(const std::vector<Letter>& letters, int depth, const MobiusMatrix& prefix,
                         int level, const WordTableOptions& opts, WordChunk& out,
                         std::atomic<std::uint64_t>& counter) {
  for (const auto& l : letters) {
    MobiusMatrix mat = prefix;
    mat.append(l);
    const auto ext = derivative_extrema_on_x(mat);
    if (level + 1 == depth) {
      if (counter.fetch_add(1, std::memory_order_relaxed) >= opts.word_budget) {
        throw BudgetError("word enumeration exceeds the word budget of " +
                          std::to_string(opts.word_budget));
      }
      const Complex den = 0.5 * mat.c + mat.d;
      out.log_x0.push_back(-std::log(std::norm(den)));
      out.log_sup.push_back(ext.log_sup);
      out.log_inf.push_back(ext.log_inf);
    } else if (ext.log_sup < opts.prune_log_sup) {
      out.pruned.push_back({ext.log_sup, depth - level - 1});
    } else {
      expand_words(letters, depth, mat, level + 1, opts, out, counter);
    }
  }
}

}  // namespace detail

inline WordTable build_word_table(const ParameterTau& tau, int depth_n, int truncation_p,
                                  const WordTableOptions& opts = {}) {
  if (depth_n < 1) throw PreconditionError("depth_n must be >= 1");
  if (truncation_p < 1) throw PreconditionError("truncation_p must be >= 1");
  const auto letters = alphabet(tau, truncation_p);
  if (opts.prune_log_sup == -std::numeric_limits<double>::infinity()) {
    const double words = std::pow(static_cast<double>(letters.size()), depth_n);
    if (words > static_cast<double>(opts.word_budget)) {
      throw BudgetError("|K'(P)|^n = " + std::to_string(words) + " exceeds the word budget");
    }
  }
  WordTable table;
  table.depth_n = depth_n;
  table.truncation_p = truncation_p;
  for (const auto& l : letters) {
    MobiusMatrix mat;
    mat.append(l);
    const auto ext = derivative_extrema_on_x(mat);
    table.letter_log_sup.push_back(ext.log_sup);
    table.letter_log_inf.push_back(ext.log_inf);
    table.letter_log_abs2.push_back(std::log(l.norm2()));
  }

  // One task per first letter; chunks are concatenated in letter order.
  std::vector<detail::WordChunk> chunks(letters.size());
  std::atomic<std::uint64_t> counter{0};
  detail::parallel_for(letters.size(), opts.policy, [&](std::size_t i) {
    MobiusMatrix mat;
    mat.append(letters[i]);
    auto& out = chunks[i];
    const auto ext = derivative_extrema_on_x(mat);
    if (depth_n == 1) {
      counter.fetch_add(1, std::memory_order_relaxed);
      out.log_x0.push_back(-std::log(std::norm(0.5 * mat.c + mat.d)));
      out.log_sup.push_back(ext.log_sup);
      out.log_inf.push_back(ext.log_inf);
    } else if (ext.log_sup < opts.prune_log_sup) {
      out.pruned.push_back({ext.log_sup, depth_n - 1});
    } else {
      detail::expand_words(letters, depth_n, mat, 1, opts, out, counter);
    }
  });
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.log_x0.size();
  table.log_x0.reserve(total);
  table.log_sup.reserve(total);
  table.log_inf.reserve(total);
  for (auto& c : chunks) {
    table.log_x0.insert(table.log_x0.end(), c.log_x0.begin(), c.log_x0.end());
    table.log_sup.insert(table.log_sup.end(), c.log_sup.begin(), c.log_sup.end());
    table.log_inf.insert(table.log_inf.end(), c.log_inf.begin(), c.log_inf.end());
    table.pruned.insert(table.pruned.end(), c.pruned.begin(), c.pruned.end());
  }
  return table;
}

namespace detail {

inline constexpr std::size_t kReductionChunk = 1 << 16;

// sum_i exp(t * logs[i]) with a fixed chunked reduction order, independent
// of the worker count.
inline double sum_exp(const std::vector<double>& logs, double t, const ExecPolicy& policy) {
  const std::size_t chunks = (logs.size() + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, policy, [&](std::size_t c) {
    CompensatedSum s;
    const std::size_t end = std::min(logs.size(), (c + 1) * kReductionChunk);
    for (std::size_t i = c * kReductionChunk; i < end; ++i) s.add(std::exp(t * logs[i]));
    partial[c] = s.value();
  });
  return compensated_sum(partial);
}

inline double pruned_bound(const WordTable& table, double t, double letter_sup_sum) {
  CompensatedSum s;
  for (const auto& p : table.pruned) {
    s.add(std::exp(t * p.log_sup) * std::pow(letter_sup_sum, p.remaining));
  }
  return s.value();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// n-level brackets

struct PsiBracket {
  double lower = 0.0;
  double upper = 0.0;
  double sum_x0 = 0.0;  // sum over kept words of |phi_w'(1/2)|^t
  std::size_t words = 0;
  std::size_t pruned = 0;
};

/// Bracket of psi^n restricted to K'(P): (k0^-t S, k0^t S) with S the sum of
/// |phi_w'(1/2)|^t; pruned prefixes add sup_X|phi_u'|^t (psi^1 sup-sum)^rest
/// to the upper value.
inline PsiBracket psi_n_bracket(const WordTable& table, double t, double k0,
                                const ExecPolicy& policy = {}) {
  if (k0 <= 0.0) throw PreconditionError("psi_n_bracket: k0 must be positive");
  PsiBracket b;
  b.sum_x0 = detail::sum_exp(table.log_x0, t, policy);
  b.words = table.size();
  b.pruned = table.pruned.size();
  const double kt = std::pow(k0, t);
  b.lower = b.sum_x0 / kt;
  b.upper = b.sum_x0 * kt;
  if (!table.pruned.empty()) {
    b.upper += detail::pruned_bound(table, t, detail::sum_exp(table.letter_log_sup, t, policy));
  }
  return b;
}

inline PsiBracket psi_n_bracket(const ParameterTau& tau, double t, int depth_n, int truncation_p,
                                double k0, const WordTableOptions& opts = {}) {
  return psi_n_bracket(build_word_table(tau, depth_n, truncation_p, opts), t, k0, opts.policy);
}

enum class BracketMethod {
  mobius_exact,   // exact sup/inf of |phi_w'| over X for every word
  distortion_k0,  // |phi_w'(1/2)| widened by k0^{+-t}
};

struct DimensionOptions {
  BracketMethod method = BracketMethod::mobius_exact;
  bool include_tail = true;  // false: dimension of the finite subsystem K'(P)
  // Shells P+1..exact_tail_through are summed letter by letter inside the
  // infinite-alphabet tail; the closed-form series covers the rest.
  // 0 selects max(P, 10).
  int exact_tail_through = 0;
  double t_min = 1.0001;
  double t_max = 2.5;
  double tolerance = 1e-4;
  int max_iterations = 60;
  WordTableOptions words{};
};

struct PressureEstimate {
  double t = 0.0;
  int depth_n = 0;
  int truncation_p = 0;
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  double tail_bound = 0.0;  // part of upper_sum from letters outside K'(P)
};

struct DimensionBracket {
  double h_low = 0.0;
  double h_high = 0.0;
  int depth_n = 0;
  int truncation_p = 0;
  [[nodiscard]] double width() const noexcept { return h_high - h_low; }
};

/// Precomputed data for repeated evaluation of the n-level bracket in t.
class PressureBracketer {
public:
  PressureBracketer(const ParameterTau& tau, int depth_n, int truncation_p, double k0,
                    const DimensionOptions& opts = {})
      : tau_(tau), k0_(k0), opts_(opts),
        table_(build_word_table(tau, depth_n, truncation_p, opts.words)) {
    if (k0 < 1.0 && opts.method == BracketMethod::distortion_k0) {
      throw PreconditionError("distortion bracket needs k0 >= 1");
    }
    tail_through_ = opts.exact_tail_through > 0 ? opts.exact_tail_through
                                                : std::max(truncation_p, 10);
    tail_through_ = std::max(tail_through_, truncation_p);
    if (opts.include_tail && opts.method == BracketMethod::mobius_exact) {
      for (int p = truncation_p + 1; p <= tail_through_; ++p) {
        for (const auto& l : shell_letters(tau, p)) {
          MobiusMatrix mat;
          mat.append(l);
          const auto ext = derivative_extrema_on_x(mat);
          tail_log_sup_.push_back(ext.log_sup);
          tail_log_inf_.push_back(ext.log_inf);
        }
      }
    }
  }

  [[nodiscard]] const WordTable& table() const noexcept { return table_; }
  [[nodiscard]] int exact_tail_through() const noexcept { return tail_through_; }

  [[nodiscard]] PressureEstimate evaluate(double t) const {
    PressureEstimate est;
    est.t = t;
    est.depth_n = table_.depth_n;
    est.truncation_p = table_.truncation_p;
    const int n = table_.depth_n;
    const auto& pol = opts_.words.policy;
    if (opts_.method == BracketMethod::distortion_k0) {
      const double kt = std::pow(k0_, t);
      const double s = detail::sum_exp(table_.log_x0, t, pol);
      est.lower_sum = s / kt;
      est.upper_sum = s * kt;
      const double letter_sup = detail::sum_exp(table_.letter_log_sup, t, pol);
      if (!table_.pruned.empty()) est.upper_sum += detail::pruned_bound(table_, t, letter_sup);
      if (opts_.include_tail) {
        // psi^1 upper values of the form k0^t |b|^{-2t}.
        const double a = kt * detail::sum_exp(table_.letter_log_abs2, -t, pol);
        const double tail = kt * psi1_upper_tail(tau_, t, table_.truncation_p);
        est.tail_bound = std::pow(a + tail, n) - std::pow(a, n);
        est.upper_sum += est.tail_bound;
      }
      return est;
    }
    const double a_sup = detail::sum_exp(table_.letter_log_sup, t, pol);
    const double a_inf = detail::sum_exp(table_.letter_log_inf, t, pol);
    est.lower_sum = detail::sum_exp(table_.log_inf, t, pol);
    est.upper_sum = detail::sum_exp(table_.log_sup, t, pol);
    if (!table_.pruned.empty()) est.upper_sum += detail::pruned_bound(table_, t, a_sup);
    if (opts_.include_tail) {
      const double up_tail = detail::sum_exp(tail_log_sup_, t, pol) + sup_series_tail(t);
      const double low_tail = detail::sum_exp(tail_log_inf_, t, pol) +
                              psi1_lower_tail(tau_, t, tail_through_);
      est.tail_bound = std::pow(a_sup + up_tail, n) - std::pow(a_sup, n);
      est.upper_sum += est.tail_bound;
      est.lower_sum += std::pow(a_inf + low_tail, n) - std::pow(a_inf, n);
    }
    return est;
  }

  /// (1/n) log of the lower and upper sums.
  [[nodiscard]] std::pair<double, double> pressure_bounds(double t) const {
    const auto est = evaluate(t);
    const double n = table_.depth_n;
    return {std::log(est.lower_sum) / n, std::log(est.upper_sum) / n};
  }

  [[nodiscard]] DimensionBracket dimension_bracket() const {
    DimensionBracket br;
    br.depth_n = table_.depth_n;
    br.truncation_p = table_.truncation_p;
    const double n = table_.depth_n;
    br.h_low = bisect([&](double t) { return std::log(evaluate(t).lower_sum) / n; }, true);
    br.h_high = bisect([&](double t) { return std::log(evaluate(t).upper_sum) / n; }, false);
    return br;
  }

private:
  // Beyond the exactly summed shells: for b in K(p), p > E, |b| >= 2^{p-1}
  // and sup_X |phi_b'| = (|b + 1/2| - 1/2)^{-2} <= |b|^{-2} (1 - 2^{-E-1})^{-2}.
  [[nodiscard]] double sup_series_tail(double t) const {
    const double stretch = std::pow(1.0 - std::ldexp(1.0, -(tail_through_ + 1)), -2.0 * t);
    return stretch * psi1_upper_tail(tau_, t, tail_through_);
  }

  // Root of a strictly decreasing function. The lower root is reported as the
  // left end of the final interval and the upper root as the right end.
  [[nodiscard]] double bisect(const std::function<double(double)>& f, bool left_end) const {
    double lo = opts_.t_min, hi = opts_.t_max;
    double f_lo = f(lo), f_hi = f(hi);
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
      throw NoSignChangeError("pressure bound does not change sign on [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "] (f(lo)=" + std::to_string(f_lo) +
                              ", f(hi)=" + std::to_string(f_hi) + "); truncation too small?");
    }
    for (int it = 0; it < opts_.max_iterations && hi - lo > opts_.tolerance; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = f(mid);
      if (!(f_mid <= f_lo && f_mid >= f_hi)) {
        throw NoSignChangeError("pressure bound is not decreasing in t near t=" +
                                std::to_string(mid));
      }
      if (f_mid > 0.0) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
        f_hi = f_mid;
      }
    }
    return left_end ? lo : hi;
  }

  ParameterTau tau_;
  double k0_;
  DimensionOptions opts_;
  WordTable table_;
  int tail_through_ = 0;
  std::vector<double> tail_log_sup_;
  std::vector<double> tail_log_inf_;
};

inline DimensionBracket dimension_bracket(const ParameterTau& tau, int depth_n, int truncation_p,
                                          double k0, const DimensionOptions& opts = {}) {
  return PressureBracketer(tau, depth_n, truncation_p, k0, opts).dimension_bracket();
}

inline PressureEstimate pressure_estimate(const ParameterTau& tau, double t, int depth_n,
                                          int truncation_p, double k0,
                                          const DimensionOptions& opts = {}) {
  return PressureBracketer(tau, depth_n, truncation_p, k0, opts).evaluate(t);
}

}  // namespace gccf
