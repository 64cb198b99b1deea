#ifndef NSBF_SPECIAL_FUNCTIONS_HPP
#define NSBF_SPECIAL_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "nsbf/error.hpp"

namespace nsbf {

/// Magnitudes below this are flushed to exactly zero in Bessel ladders.
inline constexpr double kBesselUnderflow = 1e-280;

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160273;

// j_nu(z) = sqrt(pi)/2 * sum_k (-1)^k (z/2)^(2k+nu) / (k! Gamma(k+nu+3/2)), nu >= -3/2, z > 0.
// Accurate for small z; loses digits to cancellation once z grows past a few units.
inline double spherical_bessel_series(double nu, double z) {
  const double half = 0.5 * z;
  const double log_half = std::log(half);
  // Gamma(nu + 3/2) is infinite only for nu = -3/2, where the k = 0 term vanishes.
  int k = (nu + 1.5 <= 0.0) ? 1 : 0;
  const double log_lead = (2 * k + nu) * log_half - std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.5);
  if (log_lead < std::log(kBesselUnderflow) - 5.0) return 0.0;
  double term = std::exp(log_lead) * ((k % 2) ? -1.0 : 1.0);
  double sum = term;
  const double h2 = half * half;
  for (int iter = 0; iter < 500; ++iter) {
    term *= -h2 / ((k + 1.0) * (k + nu + 1.5));
    ++k;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return 0.5 * kSqrtPi * sum;
}

inline double spherical_bessel_at_zero(double nu) {
  if (nu == 0.0) return 1.0;
  if (nu > 0.0 || nu + 1.5 == 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

inline double spherical_bessel_anchor(double nu, double z) {
  return std::sqrt(0.5 * std::numbers::pi / z) * boost::math::cyl_bessel_j(nu + 0.5, z);
}

/// out[k] = j_{nu0+k}(z) for k < out.size().
inline void spherical_bessel_range(double nu0, double z, std::span<double> out) {
  const std::size_t count = out.size();
  if (count == 0) return;
  if (z == 0.0) {
    for (std::size_t k = 0; k < count; ++k) out[k] = spherical_bessel_at_zero(nu0 + static_cast<double>(k));
    return;
  }
  if (z <= 1.0) {
    for (std::size_t k = 0; k < count; ++k) {
      const double v = spherical_bessel_series(nu0 + static_cast<double>(k), z);
      out[k] = std::abs(v) < kBesselUnderflow ? 0.0 : v;
      // Higher orders only get smaller once past the first underflow.
      if (out[k] == 0.0 && nu0 + static_cast<double>(k) > z) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), 0.0);
        return;
      }
    }
    return;
  }

  // Orders below z sit in the oscillatory region, where upward recurrence from
  // the two lowest orders is stable. Orders above z come from Miller's downward
  // recurrence, scaled to agree with the upward values at the join.
  const double inv_z = 1.0 / z;
  out[0] = spherical_bessel_anchor(nu0, z);
  const double second = spherical_bessel_anchor(nu0 + 1.0, z);
  if (count > 1) out[1] = second;
  const double last_upward = std::floor(z - nu0);
  std::size_t join = 1;
  if (last_upward > 1.0) join = std::min(count - 1, static_cast<std::size_t>(last_upward));
  for (std::size_t k = 2; k <= join && k < count; ++k) {
    const double nu = nu0 + static_cast<double>(k - 1);
    out[k] = (2.0 * nu + 1.0) * inv_z * out[k - 1] - out[k - 2];
  }
  if (join + 1 >= count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (std::abs(out[k]) < kBesselUnderflow) out[k] = 0.0;
    }
    return;
  }

  const double reach = std::max(static_cast<double>(count), z);
  const auto top = static_cast<std::size_t>(reach + 20.0 + std::ceil(std::sqrt(40.0 * reach)));
  std::vector<double> tail(count - join + 1);  // tail[i] ~ order nu0 + join - 1 + i
  const std::size_t low = join - 1;
  double above = 0.0;    // order nu+1
  double here = 1e-200;  // order nu0+top, arbitrary seed
  for (std::size_t k = top; k-- > low;) {
    const double nu = nu0 + static_cast<double>(k + 1);
    const double below = (2.0 * nu + 1.0) * inv_z * here - above;
    above = here;
    here = below;
    if (k < count) tail[k - low] = here;
    if (std::abs(here) > 1e200) {
      for (std::size_t i = (k < count ? k : count) - low; i < tail.size(); ++i) tail[i] *= 1e-200;
      above *= 1e-200;
      here *= 1e-200;
    }
  }
  const double r0 = low == 0 ? out[0] : out[low];
  const double r1 = low + 1 == 1 ? second : out[low + 1];
  const double f0 = tail[0];
  const double f1 = tail[1];
  const double fmax = std::max(std::abs(f0), std::abs(f1));
  if (!(fmax > 0.0) || !std::isfinite(fmax)) {
    throw NumericalError("spherical Bessel ladder: recurrence normalization failed at z=" + std::to_string(z));
  }
  const double g0 = f0 / fmax;
  const double g1 = f1 / fmax;
  const double scale = (r0 * g0 + r1 * g1) / (g0 * g0 + g1 * g1) / fmax;
  for (std::size_t k = join + 1; k < count; ++k) out[k] = tail[k - low] * scale;
  for (std::size_t k = 0; k < count; ++k) {
    if (std::abs(out[k]) < kBesselUnderflow) out[k] = 0.0;
  }
}

}  // namespace detail

/// j_nu(z) for nu = nu0, nu0+1, ... at a fixed argument.
struct BesselOrderLadder {
  double base_order = 0.0;
  double z = 0.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t k) const noexcept { return values[k]; }
};

/// Orders ell-1, ell, ..., ell+2N+2 of the spherical Bessel function at z.
inline BesselOrderLadder spherical_bessel_ladder(double ell, int n_terms, double z) {
  if (!(ell >= -0.5)) throw ConfigError("spherical_bessel_ladder: ell must be >= -1/2");
  if (n_terms < 0) throw ConfigError("spherical_bessel_ladder: N must be non-negative");
  if (!(z >= 0.0) || !std::isfinite(z)) throw ConfigError("spherical_bessel_ladder: z must be finite and >= 0");
  BesselOrderLadder ladder;
  ladder.base_order = ell - 1.0;
  ladder.z = z;
  ladder.values.resize(static_cast<std::size_t>(2 * n_terms + 4));
  detail::spherical_bessel_range(ladder.base_order, z, ladder.values);
  return ladder;
}

/// Single real-order spherical Bessel function j_nu(z), nu >= -3/2, z >= 0.
inline double spherical_bessel(double nu, double z) {
  if (!(nu >= -1.5)) throw ConfigError("spherical_bessel: order must be >= -3/2");
  if (!(z >= 0.0)) throw ConfigError("spherical_bessel: z must be >= 0");
  double v = 0.0;
  detail::spherical_bessel_range(nu, z, std::span<double>(&v, 1));
  return v;
}

/// P_0..P_{n_max} of the Jacobi family (alpha, beta) at y.
struct JacobiEval {
  double alpha = 0.0;
  double beta = 0.0;
  double y = 0.0;
  std::vector<double> values;

  double operator[](std::size_t n) const noexcept { return values[n]; }
};

namespace detail {

inline void jacobi_range(double alpha, double beta, double y, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  const double ab = alpha + beta;
  out[1] = (alpha + 1.0) + 0.5 * (ab + 2.0) * (y - 1.0);
  for (std::size_t n = 2; n < out.size(); ++n) {
    const double dn = static_cast<double>(n);
    const double c = 2.0 * dn + ab;
    const double a1 = 2.0 * dn * (dn + ab) * (c - 2.0);
    const double a2 = (c - 1.0) * (c * (c - 2.0) * y + alpha * alpha - beta * beta);
    const double a3 = 2.0 * (dn + alpha - 1.0) * (dn + beta - 1.0) * c;
    out[n] = (a2 * out[n - 1] - a3 * out[n - 2]) / a1;
  }
}

}  // namespace detail

inline JacobiEval jacobi_values(double alpha, double beta, int n_max, double y) {
  if (!(alpha > -1.0) || !(beta > -1.0)) throw ConfigError("jacobi_values: alpha and beta must exceed -1");
  if (n_max < 0) throw ConfigError("jacobi_values: n_max must be non-negative");
  if (!(std::abs(y) <= 1.0 + 1e-12)) throw ConfigError("jacobi_values: argument outside [-1, 1]");
  JacobiEval ev{alpha, beta, y, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  detail::jacobi_range(alpha, beta, y, ev.values);
  return ev;
}

}  // namespace nsbf

#endif  // NSBF_SPECIAL_FUNCTIONS_HPP
