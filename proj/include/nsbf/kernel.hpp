#ifndef NSBF_KERNEL_HPP
#define NSBF_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nsbf/coefficients.hpp"
#include "nsbf/error.hpp"
#include "nsbf/special_functions.hpp"

namespace nsbf {

enum class KernelKind { K, K1, R };

inline std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::K:
      return "K";
    case KernelKind::K1:
      return "K1";
    case KernelKind::R:
      return "R";
  }
  return "?";
}

/// Values of a truncated kernel series along one slice x = const.
struct KernelSlice {
  KernelKind kind = KernelKind::K;
  double x = 0.0;
  int n = 0;
  std::vector<double> t;
  std::vector<double> values;
};

namespace detail {

inline std::size_t node_at(const CoefficientSet& cs, double x) {
  const std::size_t i = cs.grid().find_node(x);
  if (i == Grid::npos || i == 0) throw ConfigError("kernel: x must be a positive grid node");
  return i;
}

inline void check_order(int n, int available, const char* what) {
  if (n < 0 || n > available) {
    throw ConfigError(std::string("kernel: N outside the computed ") + what + " orders 0.." +
                      std::to_string(available));
  }
}

// log of x^{l+1} Gamma(l+3/2) (2n)! / (2 sqrt(pi) Gamma(l+2n+2)) without the sign.
inline double log_tilde_factor(double ell, int n, double x) {
  return (ell + 1.0) * std::log(x) + std::lgamma(ell + 1.5) + std::lgamma(2.0 * n + 1.0) -
         std::log(2.0 * std::sqrt(std::numbers::pi)) - std::lgamma(ell + 2.0 * n + 2.0);
}

inline KernelSlice jacobi_kernel(const std::vector<GridFunction>& c, double ell, std::size_t node, double x,
                                 const std::vector<double>& t_nodes, int n, KernelKind kind) {
  KernelSlice slice{kind, x, n, t_nodes, std::vector<double>(t_nodes.size())};
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k < t_nodes.size(); ++k) {
    const double t = t_nodes[k];
    if (!(t >= 0.0) || t > x * (1.0 + 1e-14)) throw ConfigError("kernel: t must lie in [0, x]");
    const double s = std::min(t / x, 1.0);
    jacobi_range(ell + 0.5, 0.0, 1.0 - 2.0 * s * s, p);
    double sum = 0.0;
    for (int m = 0; m <= n; ++m) sum += c[static_cast<std::size_t>(m)][node] * p[static_cast<std::size_t>(m)];
    slice.values[k] = std::pow(s, ell + 1.0) / x * sum;
  }
  return slice;
}

}  // namespace detail

/// beta~_n(x) from beta_n(x); the factor is formed through log-gamma so it
/// stays finite for large n.
inline double beta_to_tilde(double beta, double ell, int n, double x) {
  const double sign = n % 2 ? -1.0 : 1.0;
  return sign * beta * std::exp(detail::log_tilde_factor(ell, n, x));
}

inline double tilde_to_beta(double tilde, double ell, int n, double x) {
  const double sign = n % 2 ? -1.0 : 1.0;
  return sign * tilde * std::exp(-detail::log_tilde_factor(ell, n, x));
}

/// K_N(x, t) = t^{l+1}/x^{l+2} sum_{n<=N} beta_n(x) P_n^{(l+1/2,0)}(1 - 2t^2/x^2).
inline KernelSlice kernel_K(const CoefficientSet& cs, double x, const std::vector<double>& t, int n) {
  detail::check_order(n, cs.beta_order(), "beta");
  return detail::jacobi_kernel(cs.beta, cs.ell, detail::node_at(cs, x), x, t, n, KernelKind::K);
}

/// K_{1,N}(x, t): same series with gamma_n, approximating dK/dx.
inline KernelSlice kernel_K1(const CoefficientSet& cs, double x, const std::vector<double>& t, int n) {
  detail::check_order(n, cs.gamma_order(), "gamma");
  return detail::jacobi_kernel(cs.gamma, cs.ell, detail::node_at(cs, x), x, t, n, KernelKind::K1);
}

/// R~_N(x, t) = (1 - t^2/x^2)^{l+1} sum_{n<=N} (beta~_n(x)/x) P_{2n}^{(l+1,l+1)}(t/x), |t| <= x.
inline KernelSlice kernel_R(const CoefficientSet& cs, double x, const std::vector<double>& t_nodes, int n) {
  detail::check_order(n, cs.beta_order(), "beta");
  const std::size_t node = detail::node_at(cs, x);
  const double ell = cs.ell;
  std::vector<double> tilde(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    tilde[static_cast<std::size_t>(m)] = beta_to_tilde(cs.beta[static_cast<std::size_t>(m)][node], ell, m, x) / x;
  }
  KernelSlice slice{KernelKind::R, x, n, t_nodes, std::vector<double>(t_nodes.size())};
  std::vector<double> p(2 * static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k < t_nodes.size(); ++k) {
    const double t = t_nodes[k];
    if (!(std::abs(t) <= x * (1.0 + 1e-14))) throw ConfigError("kernel: t must lie in [-x, x]");
    const double s = std::min(std::abs(t) / x, 1.0);  // the series is even in t
    detail::jacobi_range(ell + 1.0, ell + 1.0, s, p);
    double sum = 0.0;
    for (int m = 0; m <= n; ++m) sum += tilde[static_cast<std::size_t>(m)] * p[2 * static_cast<std::size_t>(m)];
    const double w = 1.0 - s * s;
    slice.values[k] = (w <= 0.0 ? 0.0 : std::pow(w, ell + 1.0)) * sum;
  }
  return slice;
}

/// count equispaced points on [0, x], or on [-x, x] for R.
inline std::vector<double> kernel_points(KernelKind kind, double x, int count) {
  if (count < 2) throw ConfigError("kernel: t_count must be at least 2");
  std::vector<double> t(static_cast<std::size_t>(count));
  const double lo = kind == KernelKind::R ? -x : 0.0;
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = lo + (x - lo) * k / (count - 1);
  t.back() = x;
  if (kind == KernelKind::R) {
    for (std::size_t k = 0; k < t.size() / 2; ++k) t[t.size() - 1 - k] = -t[k];
    if (t.size() % 2) t[t.size() / 2] = 0.0;
  }
  return t;
}

}  // namespace nsbf

#endif  // NSBF_KERNEL_HPP
