#pragma once

// The system S_tau = { phi_b(z) = 1/(z + b) : b = m + n*tau, m, n >= 1 }
// acting on the closed disk X = B[1/2, 1/2].

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gccf {

using Complex = std::complex<double>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct DegenerateDiskError : std::domain_error {
  using std::domain_error::domain_error;
};
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BudgetError : std::length_error {
  using std::length_error::length_error;
};
struct NoSignChangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// A parameter tau = u + iv of A0 = { u >= 0, v >= 1 }.
class ParameterTau {
public:
  ParameterTau(double u, double v) : u_(u), v_(v) {
    if (!(u >= 0.0) || !(v >= 1.0) || !std::isfinite(u) || !std::isfinite(v)) {
      throw PreconditionError("tau must satisfy u >= 0 and v >= 1 (got u=" +
                              std::to_string(u) + ", v=" + std::to_string(v) + ")");
    }
  }

  [[nodiscard]] double u() const noexcept { return u_; }
  [[nodiscard]] double v() const noexcept { return v_; }
  [[nodiscard]] Complex value() const noexcept { return {u_, v_}; }
  [[nodiscard]] double abs2() const noexcept { return u_ * u_ + v_ * v_; }
  [[nodiscard]] double abs() const noexcept { return std::sqrt(abs2()); }

private:
  double u_;
  double v_;
};

/// Lattice index b = m + n*tau with m, n >= 1.
class Letter {
public:
  Letter(std::int64_t m, std::int64_t n, const ParameterTau& tau) : m_(m), n_(n) {
    if (m < 1 || n < 1) {
      throw PreconditionError("letter indices start at 1 (got m=" + std::to_string(m) +
                              ", n=" + std::to_string(n) + ")");
    }
    value_ = Complex(static_cast<double>(m) + static_cast<double>(n) * tau.u(),
                     static_cast<double>(n) * tau.v());
  }

  [[nodiscard]] std::int64_t m() const noexcept { return m_; }
  [[nodiscard]] std::int64_t n() const noexcept { return n_; }
  [[nodiscard]] Complex value() const noexcept { return value_; }
  [[nodiscard]] double norm2() const noexcept { return std::norm(value_); }
  [[nodiscard]] double abs() const noexcept { return std::abs(value_); }

  friend bool operator==(const Letter& a, const Letter& b) noexcept {
    return a.m_ == b.m_ && a.n_ == b.n_;
  }

private:
  std::int64_t m_;
  std::int64_t n_;
  Complex value_;
};

/// Nonempty word w = w1 w2 ... wn; phi_w = phi_w1 o ... o phi_wn.
class Word {
public:
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) throw PreconditionError("a word has at least one letter");
  }
  Word(std::initializer_list<Letter> letters) : Word(std::vector<Letter>(letters)) {}

  [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
  [[nodiscard]] const Letter& operator[](std::size_t i) const { return letters_[i]; }
  [[nodiscard]] const std::vector<Letter>& letters() const noexcept { return letters_; }
  [[nodiscard]] auto begin() const noexcept { return letters_.begin(); }
  [[nodiscard]] auto end() const noexcept { return letters_.end(); }

  [[nodiscard]] Word prefix(std::size_t length) const {
    return Word(std::vector<Letter>(letters_.begin(),
                                    letters_.begin() + static_cast<std::ptrdiff_t>(length)));
  }

private:
  std::vector<Letter> letters_;
};

struct DiskRegion {
  Complex center;
  double radius = 0.0;
  bool closed = true;

  DiskRegion(Complex c, double r, bool is_closed = true) : center(c), radius(r), closed(is_closed) {
    if (!(r > 0.0)) throw PreconditionError("disk radius must be positive");
  }

  [[nodiscard]] bool contains(Complex z, double slack = 0.0) const noexcept {
    const double d = std::abs(z - center);
    return closed ? d <= radius + slack : d < radius + slack;
  }

  /// `inner` lies within this disk up to an absolute slack.
  [[nodiscard]] bool contains(const DiskRegion& inner, double slack = 0.0) const noexcept {
    return std::abs(inner.center - center) + inner.radius <= radius + slack;
  }

  /// Open interiors are disjoint (touching allowed within slack).
  [[nodiscard]] bool interior_disjoint(const DiskRegion& other, double slack = 0.0) const noexcept {
    return std::abs(other.center - center) > radius + other.radius - slack;
  }

  /// Distance from the closed disk's boundary inwards: radius - |c - center| - r.
  [[nodiscard]] double inclusion_margin(const DiskRegion& inner) const noexcept {
    return radius - (std::abs(inner.center - center) + inner.radius);
  }
};

inline DiskRegion unit_disk_x() { return {Complex(0.5, 0.0), 0.5, true}; }
inline DiskRegion interior_x() { return {Complex(0.5, 0.0), 0.5, false}; }

// ---------------------------------------------------------------------------
// Maps

inline Complex apply_map(const Letter& b, Complex z) {
  const Complex w = z + b.value();
  if (w == Complex(0.0, 0.0)) throw DomainError("apply_map: z = -b");
  return 1.0 / w;
}

/// |phi_b'(z)| = 1/|z + b|^2.
inline double map_derivative_abs(const Letter& b, Complex z) {
  const double d = std::norm(z + b.value());
  if (d == 0.0) throw DomainError("map_derivative_abs: z = -b");
  return 1.0 / d;
}

inline Complex word_apply(const Word& w, Complex z) {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) z = apply_map(*it, z);
  return z;
}

/// Chain rule along the orbit of z, innermost letter first.
inline double word_derivative_abs(const Word& w, Complex z) {
  double d = 1.0;
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    d *= map_derivative_abs(*it, z);
    z = apply_map(*it, z);
  }
  return d;
}

/// phi_w as a Mobius matrix (a b; c d): phi_w(z) = (a z + b)/(c z + d), det = (-1)^n.
struct MobiusMatrix {
  Complex a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

  [[nodiscard]] Complex operator()(Complex z) const { return (a * z + b) / (c * z + d); }

  // Right-multiplication by (0 1; 1 letter).
  void append(const Letter& l) noexcept {
    const Complex na = b, nb = a + b * l.value();
    const Complex nc = d, nd = c + d * l.value();
    a = na;
    b = nb;
    c = nc;
    d = nd;
  }
};

inline MobiusMatrix word_mobius(const Word& w) {
  MobiusMatrix mat;
  for (const auto& l : w) mat.append(l);
  return mat;
}

struct DerivativeExtrema {
  double log_sup;  // log sup_{z in X} |phi_w'(z)|
  double log_inf;  // log inf_{z in X} |phi_w'(z)|
};

/// Exact extrema of |phi_w'| = 1/|cz + d|^2 over X: the extreme values of
/// |cz + d| on B[1/2, 1/2] are |c/2 + d| -/+ |c|/2.
inline DerivativeExtrema derivative_extrema_on_x(const MobiusMatrix& mat) {
  const Complex center = 0.5 * mat.c + mat.d;
  const double rho = 0.5 * std::abs(mat.c);
  const double dist = std::abs(center);
  // dist - rho without cancellation: (|c/2+d|^2 - |c/2|^2)/(dist + rho).
  const double gap = (std::norm(mat.d) + std::real(mat.c * std::conj(mat.d))) / (dist + rho);
  if (!(gap > 0.0)) throw DomainError("derivative_extrema_on_x: pole inside X");
  return {-2.0 * std::log(gap), -2.0 * std::log(dist + rho)};
}

inline DerivativeExtrema word_derivative_extrema_on_x(const Word& w) {
  return derivative_extrema_on_x(word_mobius(w));
}

/// Exact image of a disk under phi_b. With c = center + b and radius rho the
/// image has center conj(c)/(|c|^2 - rho^2) and radius rho/(|c|^2 - rho^2).
inline DiskRegion mobius_disk_image(const Letter& b, const DiskRegion& disk) {
  const Complex c = disk.center + b.value();
  const double rho = disk.radius;
  const double denom = std::norm(c) - rho * rho;
  if (!(std::abs(c) > rho) || !(denom > 0.0)) {
    throw DegenerateDiskError("mobius_disk_image: disk contains -b");
  }
  return {std::conj(c) / denom, rho / denom, disk.closed};
}

/// Image of a disk under a general Mobius map (a z + b)/(c z + d) whose pole
/// lies outside the disk.
inline DiskRegion mobius_disk_image(const MobiusMatrix& mat, const DiskRegion& disk) {
  const Complex det = mat.a * mat.d - mat.b * mat.c;
  if (mat.c == Complex(0.0, 0.0)) {
    return {(mat.a * disk.center + mat.b) / mat.d, disk.radius * std::abs(mat.a / mat.d),
            disk.closed};
  }
  // c z + d sweeps the circle about s of radius |c| rho; invert, then map w -> a/c - det/(c w).
  const Complex s = mat.c * disk.center + mat.d;
  const double big_r = std::abs(mat.c) * disk.radius;
  const double denom = std::norm(s) - big_r * big_r;
  if (!(denom > 0.0)) throw DegenerateDiskError("mobius_disk_image: pole inside disk");
  return {mat.a / mat.c - (det / mat.c) * std::conj(s) / denom,
          std::abs(det) * disk.radius / denom, disk.closed};
}

/// phi_w(disk), applying the innermost letter first.
inline DiskRegion word_disk_image(const Word& w, DiskRegion disk) {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    disk = mobius_disk_image(*it, disk);
  }
  return disk;
}

// ---------------------------------------------------------------------------
// Shells K(p) = K'(p) \ K'(p-1), K'(p) = { m, n < 2^p }

inline std::int64_t shell_size(int p) {
  if (p < 1) throw PreconditionError("shell index starts at 1");
  const std::int64_t h = std::int64_t{1} << (p - 1);
  return h * (3 * h - 2);
}

inline std::int64_t alphabet_size(int p) {
  const std::int64_t e = (std::int64_t{1} << p) - 1;
  return e * e;
}

/// Letters of K(p) in row-major (m outer, n inner) order.
inline std::vector<Letter> shell_letters(const ParameterTau& tau, int p) {
  if (p < 1 || p > 24) throw PreconditionError("shell index out of range [1, 24]");
  const std::int64_t lo = std::int64_t{1} << (p - 1);
  const std::int64_t hi = (std::int64_t{1} << p) - 1;
  std::vector<Letter> out;
  out.reserve(static_cast<std::size_t>(shell_size(p)));
  for (std::int64_t m = 1; m <= hi; ++m) {
    for (std::int64_t n = 1; n <= hi; ++n) {
      if (m >= lo || n >= lo) out.emplace_back(m, n, tau);
    }
  }
  return out;
}

/// K'(P) in shell-major, row-major order. This is the canonical letter order.
inline std::vector<Letter> alphabet(const ParameterTau& tau, int truncation_p) {
  std::vector<Letter> out;
  out.reserve(static_cast<std::size_t>(alphabet_size(truncation_p)));
  for (int p = 1; p <= truncation_p; ++p) {
    auto shell = shell_letters(tau, p);
    out.insert(out.end(), shell.begin(), shell.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distortion constants

enum class K0Mode { empirical, rigorous };

struct DistortionOptions {
  double epsilon = 1.0 / 24.0;
  int boundary_points = 512;
  double safety_factor = 1.05;
  int max_search_budget = 10;
};

struct DistortionConstants {
  double k0_empirical = 1.0;
  double k0_rigorous = 1.0;
  double koebe_c = 1.0;
  double koebe_c1 = 1.0;
  double koebe_c2 = 1.0;
  double m_rigorous = 1.0;  // sup |b| / |b + z| over V
  double epsilon = 1.0 / 24.0;
  double r0 = 0.5 + 1.0 / 24.0;
  double r1 = 0.5 + 1.0 / 48.0;
  int shells_scanned = 0;
  bool shell_scan_monotone = false;
  std::int64_t argmax_m = 1;
  std::int64_t argmax_n = 1;
  std::vector<double> shell_max;  // raw (unscaled) maxima, index p-1

  [[nodiscard]] double select(K0Mode mode) const noexcept {
    return mode == K0Mode::rigorous ? k0_rigorous : k0_empirical;
  }

  [[nodiscard]] DiskRegion domain_v() const { return {Complex(0.5, 0.0), r1, false}; }
};

struct KoebeBounds {
  double c1, c2;
};

/// Koebe distortion bounds on B(0, s): (1+s)/(1-s)^3 and (1-s)/(1+s)^3.
inline KoebeBounds koebe_bounds(double s) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("koebe_bounds: need 0 < s < 1");
  return {(1.0 + s) / std::pow(1.0 - s, 3), (1.0 - s) / std::pow(1.0 + s, 3)};
}

namespace detail {

// Largest of |b|/|b+z|, the two one-sided derivative ratios against |b|^-2 and
// the two-point distortion ratio, over a boundary grid of V.
inline double letter_distortion(const Letter& b, const std::vector<Complex>& grid) {
  const double nb = b.abs();
  double min_abs = INFINITY, max_abs = 0.0;
  for (const Complex& z : grid) {
    const double a = std::abs(z + b.value());
    min_abs = std::min(min_abs, a);
    max_abs = std::max(max_abs, a);
  }
  const double ratio_m = nb / min_abs;
  const double over = (nb / min_abs) * (nb / min_abs);
  const double under = (max_abs / nb) * (max_abs / nb);
  const double bdp = (max_abs / min_abs) * (max_abs / min_abs);
  return std::max({ratio_m, over, under, bdp});
}

}  // namespace detail

inline DistortionConstants compute_distortion_constants(const ParameterTau& tau, int search_budget,
                                                        const DistortionOptions& opts = {}) {
  if (search_budget < 1) throw PreconditionError("search_budget must be >= 1");
  if (!(opts.epsilon > 0.0 && opts.epsilon < 1.0 / 12.0)) {
    throw PreconditionError("epsilon must lie in (0, 1/12)");
  }
  if (opts.boundary_points < 8) throw PreconditionError("boundary grid too coarse");

  DistortionConstants k;
  k.epsilon = opts.epsilon;
  k.r0 = 0.5 + opts.epsilon;
  k.r1 = (k.r0 + 0.5) / 2.0;

  std::vector<Complex> grid;
  grid.reserve(static_cast<std::size_t>(opts.boundary_points));
  for (int i = 0; i < opts.boundary_points; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / opts.boundary_points;
    grid.push_back(Complex(0.5, 0.0) + std::polar(k.r1, theta));
  }

  double best = 0.0;
  double m_exact = 1.0;
  auto scan_shell = [&](int p) {
    double shell_best = 0.0;
    for (const auto& b : shell_letters(tau, p)) {
      const double val = detail::letter_distortion(b, grid);
      if (val > shell_best) shell_best = val;
      if (val > best) {
        best = val;
        k.argmax_m = b.m();
        k.argmax_n = b.n();
      }
      m_exact = std::max(m_exact, b.abs() / (std::abs(b.value() + 0.5) - k.r1));
    }
    k.shell_max.push_back(shell_best);
  };

  int budget = search_budget;
  for (int p = 1; p <= budget; ++p) scan_shell(p);
  auto monotone_from_3 = [&] {
    for (std::size_t i = 3; i < k.shell_max.size(); ++i) {
      if (!(k.shell_max[i] < k.shell_max[i - 1])) return false;
    }
    return true;
  };
  // Widen until the per-shell maxima are seen to decrease from p = 3 on.
  while ((budget < 4 || !monotone_from_3()) && budget < opts.max_search_budget) {
    ++budget;
    scan_shell(budget);
  }
  k.shells_scanned = budget;
  k.shell_scan_monotone = budget >= 4 && monotone_from_3();

  k.k0_empirical = std::max(1.0, best * opts.safety_factor);

  const auto kb = koebe_bounds(k.r1 / k.r0);
  k.koebe_c1 = kb.c1;
  k.koebe_c2 = kb.c2;
  k.koebe_c = kb.c1 / kb.c2;
  // Letters outside K'(budget) have |b| >= 2^budget, so |b|/|b+z| <= 2^B/(2^B - r1).
  const double edge = std::ldexp(1.0, budget);
  k.m_rigorous = std::max(m_exact, edge / (edge - k.r1));
  k.k0_rigorous = std::max({k.koebe_c, k.m_rigorous, k.k0_empirical});
  return k;
}

}  // namespace gccf
