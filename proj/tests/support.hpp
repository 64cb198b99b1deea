#ifndef NSBF_TESTS_SUPPORT_HPP
#define NSBF_TESTS_SUPPORT_HPP

// Reference values computed without the library's own algorithms.

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace nsbf::testing {

// j_nu(z) from the ascending series in long double, 60 terms.
inline long double bessel_series(long double nu, long double z) {
  // J_{-n} = (-1)^n J_n for integer n = -(nu + 1/2) > 0.
  const long double n = -(nu + 0.5L);
  if (n > 0 && n == std::floor(n)) return (static_cast<long long>(n) % 2 ? -1 : 1) * bessel_series(-nu - 1, z);
  const long double h = z / 2;
  long double term = std::pow(h, nu) / std::tgamma(nu + 1.5L);
  long double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -h * h / (k * (k + nu + 0.5L));
    sum += term;
  }
  return std::sqrt(std::numbers::pi_v<long double>) / 2 * sum;
}

inline long double binomial(long double a, long double k) {
  return std::tgamma(a + 1) / (std::tgamma(k + 1) * std::tgamma(a - k + 1));
}

// P_n^{(alpha,beta)}(y) from the explicit finite sum.
inline long double jacobi_explicit(int n, long double alpha, long double beta, long double y) {
  long double s = 0;
  for (int k = 0; k <= n; ++k) {
    s += binomial(n + alpha, n - k) * binomial(n + beta, k) * std::pow((y - 1) / 2, k) *
         std::pow((y + 1) / 2, n - k);
  }
  return s;
}

// 1F1(a; b; z) by its Taylor series in 300-digit arithmetic; the terms of
// the large-a, negative-z cases cancel over more than 150 digits.
inline double hypergeometric_1f1(double a, double b, double z) {
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<300>>;
  const Big A = a, B = b, Z = z;
  Big term = 1, sum = 1;
  for (int k = 0; k < 20000; ++k) {
    term *= (A + k) * Z / ((B + k) * (k + 1));
    sum += term;
    if (k > a + std::abs(z) && abs(term) < abs(sum) * Big(1e-30)) break;
  }
  return static_cast<double>(sum);
}

// Regular solution for q = x^2 normalized like sqrt(pi) (omega x)^{l+1} / (2^{l+1} Gamma(l+3/2)):
// x^{l+1} e^{x^2/2} 1F1((omega^2 + 2l + 3)/4; l + 3/2; -x^2).
inline double ex1_solution(double ell, double omega, double x) {
  const long double l = ell;
  const long double w = omega;
  const long double X = x;
  const long double f = hypergeometric_1f1(static_cast<double>((w * w + 2 * l + 3) / 4), ell + 1.5, -x * x);
  const long double norm = std::sqrt(std::numbers::pi_v<long double>) * std::pow(w, l + 1) /
                           (std::pow(2.0L, l + 1) * std::tgamma(l + 1.5L));
  return static_cast<double>(norm * std::pow(X, l + 1) * std::exp(X * X / 2) * f);
}

// Same, normalized as x^{l+1} at the origin (omega = 0 allowed).
inline double ex1_u0(double ell, double x, double omega = 0.0) {
  const long double X = x;
  return static_cast<double>(std::pow(X, ell + 1.0L) * std::exp(X * X / 2) *
                             hypergeometric_1f1((omega * omega + 2 * ell + 3) / 4, ell + 1.5, -x * x));
}

// k-th positive root of tan z = z.
inline double tan_root(int k) {
  double lo = k * std::numbers::pi + 1e-9;
  double hi = (k + 0.5) * std::numbers::pi - 1e-9;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (std::tan(m) - m < 0.0) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace nsbf::testing

#endif  // NSBF_TESTS_SUPPORT_HPP
