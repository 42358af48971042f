#pragma once

// Command-line front end: constants | verify | dimension | blowup | render.
// Requires the vendored CLI11 single header on the include path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gccf/conformal_mass.hpp"
#include "gccf/core.hpp"
#include "gccf/lattice.hpp"
#include "gccf/pressure.hpp"
#include "gccf/sampler.hpp"

namespace gccf::cli {

inline constexpr const char* kVersion = "gccf 0.1.0";

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kConfigError = 2 };

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  double tau_u = 0.0;
  double tau_v = 1.0;
  double epsilon = 1.0 / 24.0;
  int truncation_p = 5;
  int depth_n = 2;
  int j_max = 1000;
  std::uint64_t samples = 200'000;
  std::uint64_t seed = detail::kDefaultSeed;
  K0Mode k0_mode = K0Mode::empirical;
  std::optional<double> k0_override;
  unsigned threads = 1;
  std::string output_dir = ".";
  int width = 512;
  int height = 512;
  std::string scheme = "auto";

  void validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (!(tau_u >= 0.0) || !(tau_v >= 1.0)) fail("tau must satisfy tau_u >= 0 and tau_v >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0 / 12.0)) fail("epsilon must lie in (0, 1/12)");
    if (truncation_p < 1 || truncation_p > 8) fail("--p must lie in [1, 8]");
    if (depth_n < 1 || depth_n > 6) fail("--n must lie in [1, 6]");
    if (j_max < 2) fail("--jmax must be >= 2");
    if (samples < 2) fail("--samples must be >= 2");
    if (threads < 1) fail("--threads must be >= 1");
    if (k0_override && !(*k0_override > 0.0)) fail("--k0 must be positive");
    if (width < 16 || height < 16) fail("image size must be >= 16");
    if (scheme != "auto" && scheme != "exhaustive" && scheme != "weighted") {
      fail("--scheme must be auto, exhaustive or weighted");
    }
  }

  [[nodiscard]] ParameterTau tau() const { return {tau_u, tau_v}; }
  [[nodiscard]] ExecPolicy policy() const { return {threads}; }

  /// Everything that affects output bytes; threads and paths are left out.
  [[nodiscard]] std::string echo() const {
    std::ostringstream os;
    os << "tau_u=" << format_double(tau_u) << " tau_v=" << format_double(tau_v)
       << " epsilon=" << format_double(epsilon) << " p=" << truncation_p << " n=" << depth_n
       << " jmax=" << j_max << " samples=" << samples << " seed=" << seed
       << " k0_mode=" << (k0_mode == K0Mode::rigorous ? "rigorous" : "empirical");
    if (k0_override) os << " k0=" << format_double(*k0_override);
    return os.str();
  }
};

struct ResolvedK0 {
  double value;
  std::string provenance;
  DistortionConstants constants;
};

inline ResolvedK0 resolve_k0(const RunConfig& cfg) {
  DistortionOptions opts;
  opts.epsilon = cfg.epsilon;
  auto dc = compute_distortion_constants(cfg.tau(), 6, opts);
  if (cfg.k0_override) return {*cfg.k0_override, "override", dc};
  const bool rig = cfg.k0_mode == K0Mode::rigorous;
  return {dc.select(cfg.k0_mode), rig ? "rigorous" : "empirical", dc};
}

inline void csv_header(std::ostream& os, const RunConfig& cfg, const std::string& command) {
  os << "# " << kVersion << ' ' << command << '\n' << "# " << cfg.echo() << '\n';
}

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

// ---------------------------------------------------------------------------
// constants

inline int cmd_constants(const RunConfig& cfg, std::ostream& out) {
  const auto tau = cfg.tau();
  const auto k0 = resolve_k0(cfg);
  const auto lm = eigen_data(tau);
  const auto c = tau_constants(lm, k0.value);
  const std::vector<std::pair<std::string, double>> rows = {
      {"lambda1", lm.lambda1}, {"lambda2", lm.lambda2},  {"n_tau", c.n_tau},
      {"l_tau", c.l_tau},      {"m_tau", c.m_tau},       {"r_big_tau", c.r_big_tau},
      {"r_small_tau", c.r_small_tau}, {"k0", k0.value},
  };
  auto os = open_output(cfg, "constants.csv");
  csv_header(os, cfg, "constants");
  os << "name,value,k0_provenance\n";
  for (const auto& [name, value] : rows) {
    os << name << ',' << format_double(value) << ',' << k0.provenance << '\n';
    out << name << " = " << format_double(value) << '\n';
  }
  out << "k0 provenance: " << k0.provenance << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// dimension

struct ScheduleRow {
  int depth_n;
  int truncation_p;
  DimensionBracket bracket;
};

/// Brackets for n = 1..depth_n and P = min(3, p)..p.
inline std::vector<ScheduleRow> dimension_schedule(const RunConfig& cfg, double k0) {
  std::vector<ScheduleRow> rows;
  DimensionOptions opts;
  opts.words.policy = cfg.policy();
  for (int n = 1; n <= cfg.depth_n; ++n) {
    for (int p = std::min(3, cfg.truncation_p); p <= cfg.truncation_p; ++p) {
      rows.push_back({n, p, dimension_bracket(cfg.tau(), n, p, k0, opts)});
    }
  }
  return rows;
}

inline int cmd_dimension(const RunConfig& cfg, std::ostream& out) {
  const auto k0 = resolve_k0(cfg);
  const auto rows = dimension_schedule(cfg, k0.value);
  auto os = open_output(cfg, "dimension.csv");
  csv_header(os, cfg, "dimension");
  os << "depth_n,truncation_p,h_low,h_high,width\n";
  for (const auto& r : rows) {
    os << r.depth_n << ',' << r.truncation_p << ',' << format_double(r.bracket.h_low) << ','
       << format_double(r.bracket.h_high) << ',' << format_double(r.bracket.width()) << '\n';
  }
  const auto& last = rows.back().bracket;
  out << "h in [" << format_double(last.h_low) << ", " << format_double(last.h_high) << "]\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// blowup

inline int cmd_blowup(const RunConfig& cfg, std::ostream& out) {
  const auto k0 = resolve_k0(cfg);
  DimensionOptions opts;
  opts.words.policy = cfg.policy();
  const auto br = dimension_bracket(cfg.tau(), cfg.depth_n, cfg.truncation_p, k0.value, opts);
  auto os = open_output(cfg, "blowup.csv");
  csv_header(os, cfg, "blowup");
  os << "h,j,r,letters,exact_count,closed_form,ratio_exact,ratio_closed\n";
  for (double h : {br.h_low, br.h_high}) {
    const auto curve = blowup_curve(cfg.tau(), h, k0.value, cfg.j_max, cfg.policy());
    out << "h = " << format_double(h) << ": crossover j = " << curve.crossover_j
        << ", ratio(jmax) = " << format_double(curve.points.back().ratio_closed) << '\n';
    for (const auto& p : curve.points) {
      os << format_double(h) << ',' << p.j << ',' << format_double(p.r) << ',' << p.letters << ','
         << format_double(p.exact_count_bound) << ',' << format_double(p.closed_form_bound) << ','
         << format_double(p.ratio_exact) << ',' << format_double(p.ratio_closed) << '\n';
    }
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// render

inline SamplePlan render_plan(const RunConfig& cfg) {
  SamplePlan plan;
  plan.truncation_p = cfg.truncation_p;
  plan.depth_n = cfg.depth_n;
  plan.seed = cfg.seed;
  plan.count = cfg.samples;
  const double words = std::pow(static_cast<double>(alphabet_size(cfg.truncation_p)), cfg.depth_n);
  const bool fits = words <= static_cast<double>(plan.point_budget);
  if (cfg.scheme == "exhaustive" || (cfg.scheme == "auto" && fits)) {
    plan.scheme = SampleScheme::exhaustive;
  } else {
    plan.scheme = SampleScheme::weighted;
  }
  return plan;
}

inline int cmd_render(const RunConfig& cfg, std::ostream& out) {
  const auto cloud = sample_limit_set(cfg.tau(), render_plan(cfg), cfg.policy());
  {
    auto os = open_output(cfg, "cloud.csv");
    write_cloud_csv(os, cloud, kVersion, cfg.echo());
  }
  auto img = open_output(cfg, "cloud.ppm");
  render_cloud(cloud, cfg.width, cfg.height).write_ppm(img);
  out << cloud.points.size() << " points, Hausdorff bound " << format_double(cloud.hausdorff_bound)
      << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// verify

struct CheckRecord {
  std::string id;
  std::string anchor;
  bool pass = false;
  double value = 0.0;
  double margin = 0.0;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  [[nodiscard]] bool ok() const {
    return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
  }
};

/// Fixed check inventory, in report order.
inline const std::vector<std::string>& check_inventory() {
  static const std::vector<std::string> ids = {
      "k0.at_least_one",          "k0.shell_scan_monotone",  "lattice.quadrant_bounds",
      "lattice.annulus_inclusion", "lattice.tau_count_lower", "system.forward_invariance",
      "system.contraction",       "system.denominator",      "system.open_set",
      "system.bounded_distortion", "system.derivative_fd",   "system.interior_witness",
      "pressure.theta_divergence", "pressure.series_sandwich", "pressure.monotone_in_t",
      "pressure.dimension_range", "mass.blowup_growth",      "mass.exact_dominates_closed",
      "mass.montecarlo_consistency", "sampler.points_in_x",  "sampler.nested_cylinders",
      "sampler.cylinder_diameter", "sampler.accumulation",
  };
  return ids;
}

namespace detail {

inline std::vector<Letter> letters_through(const ParameterTau& tau, int p) { return alphabet(tau, p); }

// |d/dz phi_w| by a central difference in binary128, so that words whose
// derivative is far below double epsilon still resolve.
inline double central_difference_abs(const Word& w, Complex z) {
  __extension__ typedef __float128 Q;
  auto eval = [&](Q re, Q im) {
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
      const Q a = re + static_cast<Q>(it->value().real());
      const Q b = im + static_cast<Q>(it->value().imag());
      const Q d = a * a + b * b;
      re = a / d;
      im = -b / d;
    }
    return std::pair{re, im};
  };
  const Q step = 1e-9;
  const auto [pr, pi] = eval(static_cast<Q>(z.real()) + step, static_cast<Q>(z.imag()));
  const auto [mr, mi] = eval(static_cast<Q>(z.real()) - step, static_cast<Q>(z.imag()));
  const Q dr = (pr - mr) / (2 * step), di = (pi - mi) / (2 * step);
  return std::sqrt(static_cast<double>(dr * dr + di * di));
}

inline Word random_word(const std::vector<Letter>& letters, gccf::detail::Rng& rng, int length) {
  std::vector<Letter> w;
  for (int i = 0; i < length; ++i) w.push_back(letters[rng.below(letters.size())]);
  return Word(std::move(w));
}

}  // namespace detail

inline VerificationReport run_verification(const RunConfig& cfg) {
  const auto tau = cfg.tau();
  const auto k0r = resolve_k0(cfg);
  const double k0 = k0r.value;
  const auto tc = tau_constants(tau, k0);
  gccf::detail::Rng rng(cfg.seed);
  VerificationReport rep;
  auto add = [&](const std::string& id, const std::string& anchor, double value, double margin) {
    rep.records.push_back({id, anchor, margin >= 0.0 && std::isfinite(margin), value, margin});
  };
  const auto small = detail::letters_through(tau, 4);
  const DiskRegion x = unit_disk_x();

  add("k0.at_least_one", "distortion constant K0 >= 1", k0, k0 - 1.0);
  {
    const auto& sm = k0r.constants.shell_max;
    double m = INFINITY;
    for (std::size_t i = 3; i < sm.size(); ++i) m = std::min(m, sm[i - 1] - sm[i]);
    add("k0.shell_scan_monotone", "per-shell distortion maxima decrease from p = 3",
        static_cast<double>(k0r.constants.shells_scanned), k0r.constants.shell_scan_monotone ? m : -1.0);
  }
  {
    double worst = INFINITY;
    for (double r = 6.0; r <= 100.0; r += 0.5) {
      const double c = static_cast<double>(count_quadrant_disk(r));
      worst = std::min({worst, c - (r * r - 7.0 * r + 7.0) / 2.0, r * r - c});
    }
    add("lattice.quadrant_bounds", "(R^2 - 7R + 7)/2 <= |I(R)| <= R^2", worst, worst);
  }
  {
    std::int64_t violations = 0;
    double checked = 0;
    const auto lm = eigen_data(tau);
    for (auto [r1, r2] : {std::pair{5.0, 40.0}, {8.0, 80.0}, {10.0, 120.0}}) {
      if (!(r1 / std::sqrt(lm.lambda1) < r2 / std::sqrt(lm.lambda2))) continue;  // D1' empty
      const auto a = verify_annulus_inclusion(tau, r1, r2);
      violations += a.violations + (a.source_points > a.target_points ? 1 : 0);
      checked += static_cast<double>(a.source_points);
    }
    add("lattice.annulus_inclusion", "E maps N^2 cap D1' into I_tau cap D2'", checked,
        -static_cast<double>(violations));
  }
  {
    double worst = INFINITY;
    for (int j = 1; j <= 20; ++j) {
      const double r = tc.r_small_tau / j;
      const double exact = static_cast<double>(count_tau_annulus(tau, r, k0));
      const double closed = tc.l_tau * k0 * k0 / (r * r) - tc.m_tau * k0 / r;
      worst = std::min(worst, exact - closed);
    }
    add("lattice.tau_count_lower", "|I_tau(r)| >= L K0^2 r^-2 - M K0 r^-1", worst, worst);
  }
  {
    double worst = INFINITY;
    for (const auto& b : small) worst = std::min(worst, x.inclusion_margin(mobius_disk_image(b, x)));
    add("system.forward_invariance", "phi_b(X) subset X", worst, worst + 1e-15);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto& b = small[rng.below(small.size())];
      const Complex z = x.center + std::polar(0.5 * std::sqrt(rng.uniform()), 6.283185307179586 * rng.uniform());
      const Complex w = x.center + std::polar(0.5 * std::sqrt(rng.uniform()), 6.283185307179586 * rng.uniform());
      if (z == w) continue;
      worst = std::max(worst, std::abs(apply_map(b, z) - apply_map(b, w)) / std::abs(z - w));
    }
    add("system.contraction", "|phi_b(z) - phi_b(w)| <= (4/5)|z - w|", worst, 0.8 - worst + 1e-12);
  }
  {
    double worst = INFINITY;
    for (const auto& b : small) {
      for (int k = 0; k < 64; ++k) {
        const Complex z = x.center + std::polar(0.5, 6.283185307179586 * k / 64.0);
        worst = std::min(worst, std::norm(z + b.value()));
      }
    }
    add("system.denominator", "|z + b|^2 >= 5/4 on X", worst, worst - 1.25 + 1e-12);
  }
  {
    double worst = INFINITY;
    std::vector<DiskRegion> imgs;
    for (const auto& b : small) imgs.push_back(mobius_disk_image(b, x));
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      for (std::size_t j = i + 1; j < imgs.size(); ++j) {
        worst = std::min(worst, std::abs(imgs[i].center - imgs[j].center) - imgs[i].radius -
                                    imgs[j].radius);
      }
    }
    add("system.open_set", "phi_a(Int X) cap phi_b(Int X) empty", worst, worst + 1e-12);
  }
  {
    double worst = 0.0;
    const auto v = k0r.constants.domain_v();
    for (const auto& b : small) {
      double lo = INFINITY, hi = 0.0;
      for (int k = 0; k < 128; ++k) {
        const double a = std::abs(v.center + std::polar(v.radius, 6.283185307179586 * k / 128.0) + b.value());
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      worst = std::max(worst, (hi / lo) * (hi / lo));
    }
    add("system.bounded_distortion", "|phi_b'(z)| <= K0 |phi_b'(w)| on V", worst, k0 - worst);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto w = detail::random_word(small, rng, 1 + static_cast<int>(rng.below(5)));
      const Complex z = x.center + std::polar(0.4 * rng.uniform(), 6.283185307179586 * rng.uniform());
      const double exact = word_derivative_abs(w, z);
      worst = std::max(worst, std::abs(detail::central_difference_abs(w, z) - exact) / exact);
    }
    add("system.derivative_fd", "chain rule matches central differences", worst, 1e-5 - worst);
  }
  {
    double margin = -1.0;
    try {
      margin = interior_witness(tau).margin;
    } catch (const DomainError&) {
    }
    add("system.interior_witness", "phi_{2+tau}(X) subset Int X", margin, margin);
  }
  {
    const double s5 = shell_psi1_partial(tau, 1.0, 5), s12 = shell_psi1_partial(tau, 1.0, 12);
    add("pressure.theta_divergence", "psi^1(1) diverges", s12 / s5, s12 - 1.5 * s5);
  }
  {
    double worst = INFINITY;
    for (double t : {1.1, 1.5, 1.9}) {
      const int p = std::max(cfg.truncation_p, 8);
      const double s = shell_psi1_partial(tau, t, p);
      const double lo = psi1_lower_bound(tau, t) - psi1_lower_tail(tau, t, p);
      const double hi = psi1_upper_bound(tau, t) - psi1_upper_tail(tau, t, p);
      worst = std::min({worst, (s - lo) / s, (hi - s) / s});
    }
    add("pressure.series_sandwich", "closed-form lower and upper series", worst, worst + 1e-12);
  }
  DimensionOptions dopts;
  dopts.words.policy = cfg.policy();
  const PressureBracketer pb(tau, cfg.depth_n, cfg.truncation_p, k0, dopts);
  {
    double worst = INFINITY;
    auto prev = pb.pressure_bounds(1.05);
    for (double t = 1.1; t <= 2.45; t += 0.05) {
      const auto cur = pb.pressure_bounds(t);
      worst = std::min({worst, prev.first - cur.first, prev.second - cur.second});
      prev = cur;
    }
    add("pressure.monotone_in_t", "P(t) strictly decreasing", worst, worst);
  }
  std::optional<DimensionBracket> br;
  try {
    br = pb.dimension_bracket();
  } catch (const NoSignChangeError&) {
  }
  add("pressure.dimension_range", "1 < h_tau < 2", br ? br->h_high - br->h_low : -1.0,
      br ? std::min(br->h_low - 1.0, 2.0 - br->h_high) : -1.0);
  {
    double growth = 0.0, dom = -INFINITY;
    if (br && k0 >= 1.0) {
      growth = INFINITY;
      dom = INFINITY;
      for (double h : {br->h_low, br->h_high}) {
        const auto c = blowup_curve(tau, h, k0, cfg.j_max, cfg.policy());
        const auto& pts = c.points;
        bool increasing = true;
        for (int j = c.crossover_j; j < cfg.j_max; ++j) {
          if (!(pts[static_cast<std::size_t>(j)].ratio_closed >
                pts[static_cast<std::size_t>(j - 1)].ratio_closed)) increasing = false;
        }
        const double g = c.crossover_j <= cfg.j_max
                             ? pts.back().ratio_closed / pts[static_cast<std::size_t>(c.crossover_j - 1)].ratio_closed
                             : 0.0;
        growth = std::min(growth, increasing ? g : 0.0);
        for (const auto& p : pts) dom = std::min(dom, p.exact_count_bound - p.closed_form_bound);
      }
    }
    add("mass.blowup_growth", "m(B(0, r_j))/r_j^h unbounded", growth, growth - 10.0);
    add("mass.exact_dominates_closed", "exact annulus count bound >= closed form", dom, dom);
  }
  {
    double z = -1.0, value = 0.0;
    if (br) {
      MonteCarloOptions mo;
      mo.samples = cfg.samples;
      mo.seed = cfg.seed;
      mo.policy = cfg.policy();
      const int p = std::min(cfg.truncation_p, 3);
      const int n = std::min(cfg.depth_n, 2);
      const auto mc = montecarlo_cylinder_measure(tau, 0.5 * (br->h_low + br->h_high), p, n,
                                                  DiskRegion(Complex(0.25, 0.0), 0.25), mo);
      value = mc.estimate;
      const double dev = std::abs(mc.estimate - mc.exact_fraction);
      z = 5.0 * mc.stderr_ + 1e-3 - dev;
    }
    add("mass.montecarlo_consistency", "cylinder weights |phi_w'|^h", value, z);
  }
  {
    SamplePlan plan;
    plan.truncation_p = std::min(cfg.truncation_p, 3);
    plan.depth_n = std::min(cfg.depth_n, 3);
    const auto cloud = sample_limit_set(tau, plan, cfg.policy());
    double worst = INFINITY;
    for (const auto& p : cloud.points) worst = std::min(worst, 0.5 - std::abs(p.z - 0.5));
    add("sampler.points_in_x", "phi_w(1/2) in X", worst, worst + 1e-15);
  }
  {
    double nest = INFINITY, diam_ratio = 0.0;
    for (int i = 0; i < 100; ++i) {
      const int len = 2 + static_cast<int>(rng.below(4));
      const auto w = detail::random_word(small, rng, len);
      const auto img = word_disk_image(w, x);
      nest = std::min(nest, word_disk_image(w.prefix(w.size() - 1), x).inclusion_margin(img));
      double prod = 1.0;
      for (const auto& b : w) prod /= b.norm2();
      const double d = 2.0 * img.radius;
      diam_ratio = std::max({diam_ratio, d / std::pow(0.8, len), d / (k0 * prod)});
    }
    add("sampler.nested_cylinders", "phi_w(X) subset phi_{w|n-1}(X)", nest, nest + 1e-12);
    add("sampler.cylinder_diameter", "diam phi_w(X) <= min{(4/5)^n, K0 prod |b_i|^-2}",
        diam_ratio, 1.0 - diam_ratio);
  }
  {
    const auto acc = accumulation_diagnostic(tau, 8);
    double worst = INFINITY;
    for (std::size_t i = 3; i < acc.rows.size(); ++i) {
      worst = std::min(worst, acc.rows[i - 1].farthest - acc.rows[i].farthest);
    }
    add("sampler.accumulation", "X_tau(infinity) = {0}", acc.rows.back().farthest,
        acc.decreasing_from_3 ? worst : -1.0);
  }
  return rep;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto rep = run_verification(cfg);
  auto os = open_output(cfg, "report.txt");
  std::size_t passed = 0;
  for (const auto& r : rep.records) {
    os << r.id << '|' << r.anchor << '|' << (r.pass ? "pass" : "fail") << '|'
       << format_double(r.value) << '|' << format_double(r.margin) << '\n';
    out << (r.pass ? "  pass  " : "  FAIL  ") << r.id << "  (" << r.anchor << ")\n";
    passed += r.pass ? 1 : 0;
  }
  out << passed << '/' << rep.records.size() << " checks passed; overall "
      << (rep.ok() ? "PASS" : "FAIL") << '\n';
  return rep.ok() ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------------------
// entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Dimension, measure and limit-set tools for complex continued fraction systems",
               "gccf"};
  app.set_version_flag("--version", kVersion);
  RunConfig cfg;
  std::string k0_mode = "empirical";
  std::optional<double> k0;
  app.add_option("--tau-u", cfg.tau_u, "Re tau (>= 0)");
  app.add_option("--tau-v", cfg.tau_v, "Im tau (>= 1)");
  app.add_option("--epsilon", cfg.epsilon, "V = B(1/2, 1/2 + epsilon) margin, in (0, 1/12)");
  app.add_option("--p", cfg.truncation_p, "alphabet truncation K'(P)");
  app.add_option("--n", cfg.depth_n, "word depth");
  app.add_option("--jmax", cfg.j_max, "blow-up sequence length");
  app.add_option("--samples", cfg.samples, "Monte-Carlo and weighted-render sample count");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--k0-mode", k0_mode, "empirical | rigorous")
      ->check(CLI::IsMember({"empirical", "rigorous"}));
  app.add_option("--k0", k0, "override the distortion constant");
  app.add_option("--threads", cfg.threads, "worker thread cap");
  app.add_option("--out", cfg.output_dir, "output directory");
  app.add_option("--width", cfg.width, "image width");
  app.add_option("--height", cfg.height, "image height");
  app.add_option("--scheme", cfg.scheme, "render scheme: auto | exhaustive | weighted");
  app.set_config("--config", "", "key=value configuration file (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  using Command = std::function<int(const RunConfig&, std::ostream&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"constants", "lattice and distortion constants", cmd_constants},
      {"verify", "run the verification suite", cmd_verify},
      {"dimension", "dimension bracket schedule", cmd_dimension},
      {"blowup", "ball-mass blow-up curves", cmd_blowup},
      {"render", "limit-set point cloud and image", cmd_render},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    cfg.k0_mode = k0_mode == "rigorous" ? K0Mode::rigorous : K0Mode::empirical;
    cfg.k0_override = k0;
    cfg.validate();
    for (const auto& [name, help, fn] : commands) {
      if (app.got_subcommand(name)) return fn(cfg, out);
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kConfigError;
}

}  // namespace gccf::cli
