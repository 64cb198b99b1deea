#ifndef NSBF_DECAY_HPP
#define NSBF_DECAY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nsbf/error.hpp"
#include "nsbf/pipeline.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

inline constexpr double kDecayFloor = 1e-12;

/// Power-law fit |beta_k| ~ C k^slope over the detected linear region.
struct DecayFit {
  bool ok = false;       // false: no linear region ("no-fit")
  double slope = 0.0;
  double intercept = 0.0;
  int first = 0;         // k range of the fit, inclusive
  int last = 0;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares(std::span<const double> lx, std::span<const double> ly) {
  const auto n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace detail

/// Slope of log|beta_k| against log k, k = first_k, first_k + 1, ...
///
/// The candidate region is the longest contiguous run of magnitudes above the
/// 1e-12 floor that keep decreasing, allowing rebounds up to a factor 3 over the
/// running minimum. Points are then trimmed from whichever end sits farther
/// from the fitted line until every point is within a factor 3 of it.
inline DecayFit fit_decay_slope(std::span<const double> magnitudes, int first_k = 1) {
  if (first_k < 1) throw ConfigError("fit_decay_slope: k must start at 1 or later");
  const auto usable = std::count_if(magnitudes.begin(), magnitudes.end(),
                                    [](double m) { return std::abs(m) > 1e-13; });
  if (usable < 20) throw ConfigError("fit_decay_slope: need at least 20 magnitudes above 1e-13");

  std::size_t best_start = 0, best_len = 0;
  std::size_t start = 0, len = 0;
  double low = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const double m = std::abs(magnitudes[i]);
    const bool above = m > kDecayFloor;
    if (above && len > 0 && m <= 3.0 * low) {
      ++len;
      low = std::min(low, m);
    } else if (above) {
      start = i;
      len = 1;
      low = m;
    } else {
      len = 0;
    }
    if (len > best_len) {
      best_len = len;
      best_start = start;
    }
  }

  DecayFit fit;
  constexpr std::size_t kMinPoints = 5;
  if (best_len < kMinPoints) return fit;
  std::vector<double> lx, ly;
  for (std::size_t i = best_start; i < best_start + best_len; ++i) {
    lx.push_back(std::log(static_cast<double>(first_k) + static_cast<double>(i)));
    ly.push_back(std::log(std::abs(magnitudes[i])));
  }
  std::size_t lo = 0, hi = lx.size();
  const double band = std::log(3.0);
  while (hi - lo >= kMinPoints) {
    const auto line = detail::least_squares(std::span(lx).subspan(lo, hi - lo), std::span(ly).subspan(lo, hi - lo));
    double worst = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      worst = std::max(worst, std::abs(ly[i] - line.slope * lx[i] - line.intercept));
    }
    if (worst <= band) {
      fit.ok = true;
      fit.slope = line.slope;
      fit.intercept = line.intercept;
      fit.first = first_k + static_cast<int>(best_start + lo);
      fit.last = first_k + static_cast<int>(best_start + hi) - 1;
      return fit;
    }
    const double dlo = std::abs(ly[lo] - line.slope * lx[lo] - line.intercept);
    const double dhi = std::abs(ly[hi - 1] - line.slope * lx[hi - 1] - line.intercept);
    if (dlo >= dhi) {
      ++lo;
    } else {
      --hi;
    }
  }
  return fit;
}

/// |beta_k(b)| for k = 1..count.
inline std::vector<double> beta_magnitudes_at_b(const Problem& problem, int count) {
  if (count < 1) throw ConfigError("decay: coefficient count must be positive");
  PipelineOptions opt;
  opt.n1 = count;
  opt.n2 = 0;
  const Pipeline p = build_pipeline(problem, opt);
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(std::abs(p.coefficients.beta[static_cast<std::size_t>(k)].back()));
  return out;
}

}  // namespace nsbf

#endif  // NSBF_DECAY_HPP
