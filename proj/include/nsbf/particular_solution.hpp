#ifndef NSBF_PARTICULAR_SOLUTION_HPP
#define NSBF_PARTICULAR_SOLUTION_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "nsbf/error.hpp"
#include "nsbf/grid.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

/// Regular solution u0 of -u'' + (l(l+1)/x^2 + q + shift) u = 0, u0 ~ x^{l+1}.
///
/// Besides u0 and u0' the scaled form v = u0 / x^{l+1} is kept as v - 1 and
/// v', which is what the coefficient recurrences consume without cancellation.
struct ParticularSolution {
  double ell = 0.0;
  double shift = 0.0;
  GridFunction u0;
  GridFunction du0;
  GridFunction scaled_minus_one;  // v - 1
  GridFunction scaled_derivative; // v'
  double min_abs_scaled = 0.0;    // min over i >= 1 of |v(x_i)|

  const Grid& grid() const noexcept { return u0.grid(); }
  double scaled(std::size_t i) const noexcept { return 1.0 + scaled_minus_one[i]; }
};

namespace detail {

// 4-stage Gauss-Legendre collocation on [0, 1] (order 8).
struct GaussLegendre4 {
  std::array<double, 4> c{};
  std::array<double, 4> b{};
  std::array<std::array<double, 4>, 4> a{};

  GaussLegendre4() {
    const long double r = std::sqrt(6.0L / 5.0L);
    const long double inner = std::sqrt(3.0L / 7.0L - 2.0L / 7.0L * r);
    const long double outer = std::sqrt(3.0L / 7.0L + 2.0L / 7.0L * r);
    const long double s30 = std::sqrt(30.0L);
    const std::array<long double, 4> roots{-outer, -inner, inner, outer};
    const std::array<long double, 4> weights{(18.0L - s30) / 36.0L, (18.0L + s30) / 36.0L,
                                             (18.0L + s30) / 36.0L, (18.0L - s30) / 36.0L};
    std::array<long double, 4> cl{};
    std::array<long double, 4> wl{};
    for (int i = 0; i < 4; ++i) {
      cl[i] = 0.5L * (roots[i] + 1.0L);
      wl[i] = 0.5L * weights[i];
    }
    auto lagrange = [&](int j, long double s) {
      long double v = 1.0L;
      for (int k = 0; k < 4; ++k) {
        if (k != j) v *= (s - cl[k]) / (cl[j] - cl[k]);
      }
      return v;
    };
    // a_ij = integral of L_j over [0, c_i]; the 4-point rule is exact for the cubic L_j.
    for (int i = 0; i < 4; ++i) {
      c[i] = static_cast<double>(cl[i]);
      b[i] = static_cast<double>(wl[i]);
      for (int j = 0; j < 4; ++j) {
        long double s = 0.0L;
        for (int m = 0; m < 4; ++m) s += wl[m] * lagrange(j, cl[i] * cl[m]);
        a[i][j] = static_cast<double>(cl[i] * s);
      }
    }
  }
};

inline const GaussLegendre4& gauss_legendre4() {
  static const GaussLegendre4 tableau;
  return tableau;
}

}  // namespace detail

/// Integrates d = v - 1, w = v' through
///   d' = w,  w' = (q + shift)(1 + d) - (2l + 2) w / x,  d(0) = w(0) = 0
/// with the implicit 4-stage Gauss-Legendre scheme on the problem mesh. Stage
/// points are interior to each step, so the singular coefficient is never
/// evaluated at x = 0.
inline ParticularSolution compute_u0(const Problem& problem, double shift) {
  problem.validate();
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw ConfigError("compute_u0: shift must be finite and >= 0");
  const Grid grid = problem.grid();
  const double ell = problem.ell;
  const double kappa = 2.0 * ell + 2.0;
  const double h = grid.step();
  const auto& gl = detail::gauss_legendre4();

  ParticularSolution ps{ell, shift, GridFunction(grid), GridFunction(grid), GridFunction(grid), GridFunction(grid),
                        0.0};
  double d = 0.0;
  double w = 0.0;
  using Mat8 = Eigen::Matrix<double, 8, 8>;
  using Vec8 = Eigen::Matrix<double, 8, 1>;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double x0 = grid.node(n);
    std::array<double, 4> p{};
    std::array<double, 4> damp{};
    for (int i = 0; i < 4; ++i) {
      const double xi = x0 + gl.c[i] * h;
      p[i] = problem.q(xi) + shift;
      damp[i] = kappa / xi;
    }
    // Unknowns: slopes K_i = (kd_i, kw_i) at each stage,
    //   kd_i = w + h sum_j a_ij kw_j
    //   kw_i = p_i (1 + d + h sum_j a_ij kd_j) - damp_i (w + h sum_j a_ij kw_j)
    Mat8 lhs = Mat8::Identity();
    Vec8 rhs;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double ha = h * gl.a[i][j];
        lhs(2 * i, 2 * j + 1) -= ha;
        lhs(2 * i + 1, 2 * j) -= p[i] * ha;
        lhs(2 * i + 1, 2 * j + 1) += damp[i] * ha;
      }
      rhs(2 * i) = w;
      rhs(2 * i + 1) = p[i] * (1.0 + d) - damp[i] * w;
    }
    const Vec8 k = lhs.partialPivLu().solve(rhs);
    for (int i = 0; i < 4; ++i) {
      d += h * gl.b[i] * k(2 * i);
      w += h * gl.b[i] * k(2 * i + 1);
    }
    if (!std::isfinite(d) || !std::isfinite(w) || std::abs(d) > 1e250) {
      throw NumericalError("compute_u0: solution overflowed; shift too large for mesh (shift=" +
                           std::to_string(shift) + ")");
    }
    ps.scaled_minus_one[n + 1] = d;
    ps.scaled_derivative[n + 1] = w;
  }

  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double v = 1.0 + ps.scaled_minus_one[i];
    if (i == 0) {
      ps.u0[0] = 0.0;
      // u0'(0) is (l+1) 0^l: 1 for l = 0, 0 for l > 0, unbounded (stored as 0) for l < 0.
      ps.du0[0] = ell == 0.0 ? 1.0 : 0.0;
      continue;
    }
    const double xl = std::pow(x, ell);
    ps.u0[i] = xl * x * v;
    ps.du0[i] = xl * ((ell + 1.0) * v + x * ps.scaled_derivative[i]);
    min_abs = std::min(min_abs, std::abs(v));
  }
  ps.min_abs_scaled = min_abs;
  return ps;
}

/// Relative threshold on |u0 / x^{l+1}| below which u0 counts as vanishing.
inline constexpr double kVanishingThreshold = 1e-8;

/// Regular solution that has no zero on (0, b], shifting q by
/// 0, 1, 2, 4, 8, ... until the scaled solution stays above threshold.
inline ParticularSolution ensure_nonvanishing(const Problem& problem) {
  double shift = 0.0;
  while (true) {
    ParticularSolution ps = compute_u0(problem, shift);
    bool ok = ps.min_abs_scaled >= kVanishingThreshold;
    for (std::size_t i = 1; ok && i < ps.u0.size(); ++i) ok = ps.scaled(i) > 0.0;
    if (ok) return ps;
    shift = shift == 0.0 ? 1.0 : 2.0 * shift;
    if (shift > 0x1p60) throw NumericalError("ensure_nonvanishing: shift search failed");
  }
}

}  // namespace nsbf

#endif  // NSBF_PARTICULAR_SOLUTION_HPP
