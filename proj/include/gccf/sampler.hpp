#pragma once

// Point clouds approximating J_tau through the coding map w -> phi_w(1/2),
// a PPM rasterizer and the accumulation diagnostic X_tau(infinity) = {0}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gccf/core.hpp"
#include "gccf/detail/parallel.hpp"
#include "gccf/detail/rng.hpp"
#include "gccf/detail/summation.hpp"

namespace gccf {

enum class SampleScheme { exhaustive, weighted };

struct SamplePlan {
  int truncation_p = 3;
  int depth_n = 3;
  SampleScheme scheme = SampleScheme::exhaustive;
  std::uint64_t seed = detail::kDefaultSeed;
  std::uint64_t count = 100'000;  // weighted scheme only
  double h = 1.5;                 // weighted scheme exponent
  std::uint64_t point_budget = 5'000'000;
};

struct CloudPoint {
  Complex z;
  std::uint64_t word_id;  // base-|K'(P)| digits of the word, first letter most significant
};

struct PointCloud {
  std::vector<CloudPoint> points;
  ParameterTau tau{0.0, 1.0};
  SamplePlan plan;
  double hausdorff_bound = 1.0;  // (4/5)^n diam(X)
};

inline PointCloud sample_limit_set(const ParameterTau& tau, const SamplePlan& plan,
                                   const ExecPolicy& policy = {}) {
  if (plan.depth_n < 1 || plan.truncation_p < 1) {
    throw PreconditionError("sample_limit_set: depth and truncation must be >= 1");
  }
  const auto letters = alphabet(tau, plan.truncation_p);
  const auto k = static_cast<std::uint64_t>(letters.size());
  PointCloud cloud;
  cloud.tau = tau;
  cloud.plan = plan;
  cloud.hausdorff_bound = std::pow(0.8, plan.depth_n);
  const Complex anchor(0.5, 0.0);

  if (plan.scheme == SampleScheme::exhaustive) {
    const double words = std::pow(static_cast<double>(k), plan.depth_n);
    if (words > static_cast<double>(plan.point_budget)) {
      throw BudgetError("exhaustive plan needs " + std::to_string(words) +
                        " points, budget is " + std::to_string(plan.point_budget));
    }
    const auto total = static_cast<std::uint64_t>(words);
    const std::uint64_t per_first = total / k;
    cloud.points.resize(total);
    // Lexicographic order; partitioned by first letter.
    detail::parallel_for(k, policy, [&](std::size_t first) {
      std::vector<std::size_t> digits(static_cast<std::size_t>(plan.depth_n), 0);
      digits[0] = first;
      for (std::uint64_t r = 0; r < per_first; ++r) {
        std::uint64_t rem = r;
        for (int i = plan.depth_n - 1; i >= 1; --i) {
          digits[static_cast<std::size_t>(i)] = rem % k;
          rem /= k;
        }
        MobiusMatrix mat;
        for (auto d : digits) mat.append(letters[d]);
        const std::uint64_t id = first * per_first + r;
        cloud.points[id] = {mat(anchor), id};
      }
    });
    return cloud;
  }

  if (plan.count > plan.point_budget) {
    throw BudgetError("weighted plan count exceeds the point budget");
  }
  std::vector<double> cumulative(letters.size());
  {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      s.add(std::pow(letters[i].norm2(), -plan.h));
      cumulative[i] = s.value();
    }
  }
  const double total_weight = cumulative.back();
  constexpr std::uint64_t batch = 4096;
  const std::uint64_t batches = (plan.count + batch - 1) / batch;
  cloud.points.resize(plan.count);
  detail::parallel_for(batches, policy, [&](std::size_t b) {
    detail::Rng rng(detail::derive_seed(plan.seed, b));
    const std::uint64_t begin = b * batch;
    const std::uint64_t end = std::min(plan.count, begin + batch);
    for (std::uint64_t s = begin; s < end; ++s) {
      MobiusMatrix mat;
      std::uint64_t id = 0;
      for (int i = 0; i < plan.depth_n; ++i) {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rng.uniform() * total_weight);
        if (it == cumulative.end()) --it;
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        mat.append(letters[idx]);
        id = id * k + idx;
      }
      cloud.points[s] = {mat(anchor), id};
    }
  });
  return cloud;
}

/// Word letters recovered from a word id.
inline Word decode_word(const ParameterTau& tau, const SamplePlan& plan, std::uint64_t id) {
  const auto letters = alphabet(tau, plan.truncation_p);
  std::vector<Letter> out;
  out.reserve(static_cast<std::size_t>(plan.depth_n));
  for (int i = 0; i < plan.depth_n; ++i) {
    out.push_back(letters[id % letters.size()]);
    id /= letters.size();
  }
  std::reverse(out.begin(), out.end());
  return Word(std::move(out));
}

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  void write_ppm(std::ostream& os) const {
    os << "P6\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  }
};

inline constexpr double kRenderLow = -0.05;
inline constexpr double kRenderHigh = 1.05;

/// Pixel of z in the [-0.05, 1.05]^2 viewport, clamped to the image.
inline std::pair<int, int> render_pixel(Complex z, int width, int height) {
  const double span = kRenderHigh - kRenderLow;
  const auto px = static_cast<int>(std::lround((z.real() - kRenderLow) / span * width));
  const auto py = static_cast<int>(std::lround((kRenderHigh - z.imag()) / span * height));
  return {std::clamp(px, 0, width - 1), std::clamp(py, 0, height - 1)};
}

inline Image render_cloud(const PointCloud& cloud, int width, int height) {
  if (width < 16 || height < 16) throw PreconditionError("render_cloud: image must be >= 16x16");
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(width) * height, 0);
  std::uint64_t peak = 0;
  for (const auto& p : cloud.points) {
    const auto [x, y] = render_pixel(p.z, width, height);
    auto& cell = hits[static_cast<std::size_t>(y) * width + x];
    peak = std::max(peak, ++cell);
  }
  Image img{width, height, std::vector<std::uint8_t>(hits.size() * 3, 255)};
  if (peak == 0) return img;
  const double scale = std::log1p(static_cast<double>(peak));
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] == 0) continue;
    const double level = std::log1p(static_cast<double>(hits[i])) / scale;
    const auto shade = static_cast<std::uint8_t>(std::lround(220.0 * (1.0 - level)));
    img.rgb[3 * i] = shade;
    img.rgb[3 * i + 1] = shade;
    img.rgb[3 * i + 2] = static_cast<std::uint8_t>(std::min(255L, std::lround(shade + 35.0)));
  }
  return img;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud, const std::string& version,
                            const std::string& config_echo = "") {
  const auto& plan = cloud.plan;
  os << "# tau_u,tau_v,p,n,scheme,seed\n";
  os << "# " << format_double(cloud.tau.u()) << ',' << format_double(cloud.tau.v()) << ','
     << plan.truncation_p << ',' << plan.depth_n << ','
     << (plan.scheme == SampleScheme::exhaustive ? "exhaustive" : "weighted") << ','
     << plan.seed << '\n';
  os << "# " << version << '\n';
  if (!config_echo.empty()) os << "# " << config_echo << '\n';
  os << "re,im,word_id\n";
  for (const auto& p : cloud.points) {
    os << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ',' << p.word_id << '\n';
  }
}

struct AccumulationRow {
  int p;
  double farthest;  // max_{b in K(p)} max_{z in phi_b(X)} |z|
};

struct AccumulationTable {
  std::vector<AccumulationRow> rows;
  double fitted_c = 0.0;  // max_p farthest(p) 2^{p-1}
  bool decreasing_from_3 = true;
};

/// The image disk phi_b(X) has center conj(s)/(|s|^2 - 1/4) and radius
/// (1/2)/(|s|^2 - 1/4) with s = b + 1/2, so its farthest point from 0 sits at
/// distance 1/(|s| - 1/2).
inline AccumulationTable accumulation_diagnostic(const ParameterTau& tau, int p_max) {
  if (p_max < 3) throw PreconditionError("accumulation_diagnostic: p_max must be >= 3");
  AccumulationTable t;
  for (int p = 1; p <= p_max; ++p) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& b : shell_letters(tau, p)) nearest = std::min(nearest, std::abs(b.value() + 0.5));
    const double far = 1.0 / (nearest - 0.5);
    if (p > 3 && !(far < t.rows.back().farthest)) t.decreasing_from_3 = false;
    t.rows.push_back({p, far});
    t.fitted_c = std::max(t.fitted_c, far * std::ldexp(1.0, p - 1));
  }
  return t;
}

}  // namespace gccf
