#ifndef NSBF_COEFFICIENTS_HPP
#define NSBF_COEFFICIENTS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsbf/error.hpp"
#include "nsbf/grid.hpp"
#include "nsbf/particular_solution.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

/// Coefficients beta_n(x), gamma_n(x) of the Neumann series
///   u(w, x)  = w x j_l(w x) + sum_n beta_n(x) j_{l+2n+1}(w x)
///   u'(w, x) = w^2 x j_{l-1}(w x) + (x Q(x)/2 - l) w j_l(w x) + sum_n gamma_n(x) j_{l+2n+1}(w x)
/// for the shifted potential q + shift, together with the verification
/// residuals used to pick the truncation orders.
struct CoefficientSet {
  double ell = 0.0;
  double shift = 0.0;
  std::vector<GridFunction> beta;
  std::vector<GridFunction> gamma;
  GridFunction Q;  // integral of (q + shift) from 0

  // eta_n / x^{2n+2l+1} and theta_n / x^{2n} for n = 1.. (index n-1).
  std::vector<GridFunction> eta_scaled;
  std::vector<GridFunction> theta_scaled;

  // |sum_{n<=N} (-1)^n beta_n(b) - b Q(b)/2| for N = 0..N1.
  std::vector<double> beta_residuals;
  // Same for gamma against b (Q(b)^2/8 + q(b)/4 - (2l+1) q(0)/4); empty when q(0) is unbounded.
  std::vector<double> gamma_residuals;

  std::optional<double> q_at_zero;  // of q + shift
  double q_at_b = 0.0;

  const Grid& grid() const noexcept { return Q.grid(); }
  int beta_order() const noexcept { return static_cast<int>(beta.size()) - 1; }
  int gamma_order() const noexcept { return static_cast<int>(gamma.size()) - 1; }

  /// x Q(x) / 2, the value of sum (-1)^n beta_n(x).
  double beta_target(std::size_t i) const { return grid().node(i) * Q[i] / 2.0; }

  /// x (Q^2/8 + q(x)/4 - (2l+1) q(0)/4), the value of sum (-1)^n gamma_n(x), at
  /// the right endpoint if q(0) is finite.
  std::optional<double> gamma_target_at_b() const {
    if (!q_at_zero) return std::nullopt;
    const double b = grid().b();
    return b * (Q.back() * Q.back() / 8.0 + q_at_b / 4.0 - (2.0 * ell + 1.0) * *q_at_zero / 4.0);
  }
};

namespace detail {

/// Gauss-Legendre nodes and weights on [0, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule make_gauss_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 0; i < (order + 1) / 2; ++i) {
    long double z = std::cos(pi * (i + 0.75L) / (order + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = z;
      for (int n = 2; n <= order; ++n) {
        const long double p2 = ((2.0L * n - 1.0L) * z * p1 - (n - 1.0L) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0L;
      dp = order * (z * p1 - p0) / (z * z - 1.0L);
      const long double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    const long double w = 1.0L / ((1.0L - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = static_cast<double>(0.5L * (1.0L - z));
    rule.nodes[hi] = static_cast<double>(0.5L * (1.0L + z));
    rule.weights[lo] = static_cast<double>(w);
    rule.weights[hi] = static_cast<double>(w);
  }
  return rule;
}

inline const GaussRule& gauss_rule(int order) {
  static const std::array<GaussRule, 6> rules{make_gauss_rule(8), make_gauss_rule(16), make_gauss_rule(32),
                                              make_gauss_rule(64), make_gauss_rule(128), make_gauss_rule(256)};
  std::size_t idx = 0;
  while (idx + 1 < rules.size() && static_cast<int>(rules[idx].nodes.size()) < order) ++idx;
  return rules[idx];
}

// Lagrange basis on the block nodes 0..5 at local coordinate sigma.
inline std::array<double, 6> block_basis(double sigma) {
  std::array<double, 6> l{};
  for (int r = 0; r < 6; ++r) {
    double v = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m != r) v *= (sigma - m) / static_cast<double>(r - m);
    }
    l[static_cast<std::size_t>(r)] = v;
  }
  return l;
}

// Monomial coefficients of the degree-5 interpolant through (r, f_r), r = 0..5.
inline std::array<double, 6> block_monomials(std::span<const double> f) {
  static const Eigen::Matrix<double, 6, 6> inverse = [] {
    Eigen::Matrix<double, 6, 6> v;
    for (int r = 0; r < 6; ++r) {
      for (int j = 0; j < 6; ++j) v(r, j) = std::pow(static_cast<double>(r), j);
    }
    return Eigen::Matrix<double, 6, 6>(v.inverse());
  }();
  Eigen::Matrix<double, 6, 1> rhs;
  for (int r = 0; r < 6; ++r) rhs(r) = f[static_cast<std::size_t>(r)];
  const Eigen::Matrix<double, 6, 1> c = inverse * rhs;
  return {c(0), c(1), c(2), c(3), c(4), c(5)};
}

/// out[i] = x_i^{-(k+1)} * integral_0^{x_i} t^k f(t) dt on a uniform mesh,
/// with out[0] = f(0)/(k+1). f is replaced by its degree-5 interpolant on
/// each 6-node block and the weight (t/x_i)^k is integrated exactly (first
/// block) or by Gauss-Legendre sized to its steepness, so the result stays
/// accurate and bounded for large k near the origin.
inline void scaled_moment_integral(std::span<const double> f, double k, std::span<double> out) {
  const std::size_t blocks = (f.size() - 1) / 5;
  out[0] = f[0] / (k + 1.0);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t s = 5 * blk;
    const double ds = static_cast<double>(s);
    const auto block = f.subspan(s, 6);
    std::array<double, 6> mono{};
    if (s == 0) mono = block_monomials(block);
    for (std::size_t j = 1; j <= 5; ++j) {
      const double di = static_cast<double>(s + j);
      double local = 0.0;
      if (s == 0) {
        double power = 1.0;
        for (std::size_t m = 0; m < 6; ++m) {
          local += mono[m] * power / (k + static_cast<double>(m) + 1.0);
          power *= di;
        }
      } else {
        const double steep = k * std::log(di / ds);
        const GaussRule& rule = gauss_rule(8 + static_cast<int>(std::ceil(1.5 * steep)));
        const double len = di - ds;
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
          const double tau = ds + len * rule.nodes[g];
          const auto l = block_basis(tau - ds);
          double p = 0.0;
          for (std::size_t r = 0; r < 6; ++r) p += l[r] * block[r];
          local += rule.weights[g] * std::exp(k * std::log(tau / di)) * p;
        }
        local *= len / di;
      }
      const double carry = s == 0 ? 0.0 : std::exp((k + 1.0) * std::log(ds / di)) * out[s];
      out[s + j] = carry + local;
    }
  }
}

/// Near x = 0 the recurrences lose all digits: a parasitic solution growing
/// like x^{-2n} swamps the true coefficient, which vanishes like x^{2n+2}.
/// Walking out from the origin, values are zeroed up to the smallest
/// magnitude seen before the function has risen a thousandfold above it.
/// Returns the first node kept.
inline std::size_t suppress_origin_noise(GridFunction& f) {
  const std::size_t size = f.size();
  std::size_t best = 1;
  double low = std::abs(f[1]);
  for (std::size_t i = 2; i < size; ++i) {
    const double a = std::abs(f[i]);
    if (a < low) {
      low = a;
      best = i;
    } else if (a > 1e3 * low) {
      break;
    }
  }
  for (std::size_t i = 0; i < best; ++i) f[i] = 0.0;
  return best;
}

inline double alternating_sum_at(const std::vector<GridFunction>& c, std::size_t upto, std::size_t node) {
  double s = 0.0;
  for (std::size_t n = 0; n <= upto; ++n) s += (n % 2 ? -1.0 : 1.0) * c[n][node];
  return s;
}

}  // namespace detail

/// beta_0..beta_{N1} by the integration-only recurrence.
///
/// beta_0 = (2l+3)(v - 1) with v = u0/x^{l+1}; for n >= 1, writing
/// E_n = eta_n/x^{2n+2l+1} and T_n = theta_n/x^{2n},
///   E_n = x^{-(2n+2l+1)} int_0^x t^{2n+2l} ((2n+2l+1) v + t v') beta_{n-1} dt
///   T_n = x^{-2n} int_0^x t^{2n-1} (E_n - beta_{n-1} v) / v^2 dt
///   beta_n = -(4n+2l+3)/(4n+2l-1) [beta_{n-1} + 2(4n+2l+1) v T_n].
inline CoefficientSet beta_coefficients(const ParticularSolution& ps, const Potential& q, int n1) {
  if (n1 < 0) throw ConfigError("beta_coefficients: N1 must be non-negative");
  if (!(ps.min_abs_scaled > 0.0)) {
    throw NumericalError("beta_coefficients: particular solution vanishes on (0, b]; apply a spectral shift");
  }
  const Grid& grid = ps.grid();
  const std::size_t size = grid.size();
  const double ell = ps.ell;

  CoefficientSet cs{ell, ps.shift, {}, {}, q.integral(grid), {}, {}, {}, {}, std::nullopt, 0.0};
  for (std::size_t i = 0; i < size; ++i) cs.Q[i] += ps.shift * grid.node(i);
  if (auto q0 = q.value_at_zero()) cs.q_at_zero = *q0 + ps.shift;
  cs.q_at_b = q(grid.b()) + ps.shift;
  if (!cs.Q.all_finite()) throw NumericalError("beta_coefficients: integral of q is not finite");

  GridFunction beta0(grid);
  for (std::size_t i = 0; i < size; ++i) beta0[i] = (2.0 * ell + 3.0) * ps.scaled_minus_one[i];
  cs.beta.push_back(std::move(beta0));

  std::vector<double> integrand(size);
  for (int n = 1; n <= n1; ++n) {
    const GridFunction& prev = cs.beta.back();
    const double m = 2.0 * n + 2.0 * ell;
    for (std::size_t i = 0; i < size; ++i) {
      const double x = grid.node(i);
      integrand[i] = ((m + 1.0) * ps.scaled(i) + x * ps.scaled_derivative[i]) * prev[i];
    }
    GridFunction eta(grid);
    detail::scaled_moment_integral(integrand, m, eta.values());

    for (std::size_t i = 0; i < size; ++i) {
      const double v = ps.scaled(i);
      integrand[i] = (eta[i] - prev[i] * v) / (v * v);
    }
    GridFunction theta(grid);
    detail::scaled_moment_integral(integrand, 2.0 * n - 1.0, theta.values());

    const double ratio = (4.0 * n + 2.0 * ell + 3.0) / (4.0 * n + 2.0 * ell - 1.0);
    const double inner = 2.0 * (4.0 * n + 2.0 * ell + 1.0);
    GridFunction next(grid);
    next[0] = 0.0;
    for (std::size_t i = 1; i < size; ++i) {
      next[i] = -ratio * (prev[i] + inner * ps.scaled(i) * theta[i]);
    }
    detail::suppress_origin_noise(next);
    if (!next.all_finite()) {
      throw NumericalError("beta_coefficients: beta_" + std::to_string(n) + " overflowed; reduce N1");
    }
    cs.beta.push_back(std::move(next));
    cs.eta_scaled.push_back(std::move(eta));
    cs.theta_scaled.push_back(std::move(theta));
  }

  const std::size_t last = size - 1;
  const double target = cs.beta_target(last);
  for (int n = 0; n <= n1; ++n) {
    cs.beta_residuals.push_back(std::abs(detail::alternating_sum_at(cs.beta, static_cast<std::size_t>(n), last) - target));
  }
  return cs;
}

/// Convenience overload for a potential given by grid samples.
inline CoefficientSet beta_coefficients(const ParticularSolution& ps, const GridFunction& q, int n1) {
  return beta_coefficients(ps, Potential::sampled(q), n1);
}

/// gamma_0..gamma_{N2}, reusing the eta/theta integrals of beta_coefficients():
///   gamma_0 = (2l+3)((l+1)(v-1)/x + v' - Q/2)
///   gamma_n = -(4n+2l+3)/(4n+2l-1) [gamma_{n-1}
///             + (4n+2l+1)(2((l+1)v + x v') T_n + 2 E_n / v - beta_{n-1}) / x].
inline CoefficientSet gamma_coefficients(CoefficientSet cs, const ParticularSolution& ps, int n2) {
  if (n2 < 0) throw ConfigError("gamma_coefficients: N2 must be non-negative");
  if (n2 > cs.beta_order()) {
    throw ConfigError("gamma_coefficients: N2 = " + std::to_string(n2) + " exceeds computed beta order " +
                      std::to_string(cs.beta_order()));
  }
  const Grid& grid = ps.grid();
  const std::size_t size = grid.size();
  const double ell = cs.ell;

  cs.gamma.clear();
  GridFunction gamma0(grid);
  for (std::size_t i = 1; i < size; ++i) {
    const double x = grid.node(i);
    gamma0[i] = (2.0 * ell + 3.0) *
                ((ell + 1.0) * ps.scaled_minus_one[i] / x + ps.scaled_derivative[i] - cs.Q[i] / 2.0);
  }
  cs.gamma.push_back(std::move(gamma0));

  for (int n = 1; n <= n2; ++n) {
    const GridFunction& prev = cs.gamma.back();
    const GridFunction& beta_prev = cs.beta[static_cast<std::size_t>(n - 1)];
    const GridFunction& eta = cs.eta_scaled[static_cast<std::size_t>(n - 1)];
    const GridFunction& theta = cs.theta_scaled[static_cast<std::size_t>(n - 1)];
    const double ratio = (4.0 * n + 2.0 * ell + 3.0) / (4.0 * n + 2.0 * ell - 1.0);
    const double inner = 4.0 * n + 2.0 * ell + 1.0;
    GridFunction next(grid);
    for (std::size_t i = 1; i < size; ++i) {
      const double x = grid.node(i);
      const double v = ps.scaled(i);
      const double dv = ps.scaled_derivative[i];
      const double bracket = 2.0 * ((ell + 1.0) * v + x * dv) * theta[i] + 2.0 * eta[i] / v - beta_prev[i];
      next[i] = -ratio * (prev[i] + inner * bracket / x);
    }
    detail::suppress_origin_noise(next);
    if (!next.all_finite()) {
      throw NumericalError("gamma_coefficients: gamma_" + std::to_string(n) + " overflowed; reduce N2");
    }
    cs.gamma.push_back(std::move(next));
  }

  cs.gamma_residuals.clear();
  if (auto target = cs.gamma_target_at_b()) {
    const std::size_t last = size - 1;
    for (int n = 0; n <= n2; ++n) {
      cs.gamma_residuals.push_back(
          std::abs(detail::alternating_sum_at(cs.gamma, static_cast<std::size_t>(n), last) - *target));
    }
  }
  return cs;
}

/// Index minimizing the residual history; ties go to the smaller index.
inline int select_truncation(std::span<const double> history) {
  if (history.empty()) throw ConfigError("select_truncation: empty residual history");
  std::size_t best = 0;
  for (std::size_t n = 1; n < history.size(); ++n) {
    if (history[n] < history[best]) best = n;
  }
  return static_cast<int>(best);
}

}  // namespace nsbf

#endif  // NSBF_COEFFICIENTS_HPP
