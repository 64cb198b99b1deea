#ifndef NSBF_ORACLE_HPP
#define NSBF_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "nsbf/error.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

/// Reference values of the regular solution from direct adaptive integration.
struct OracleResult {
  double omega = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> du;
  double error_bound = 0.0;  // largest accepted local error estimate
  long steps = 0;
};

namespace detail {

// Dormand-Prince 8(5,3) tableau.
struct Dop853 {
  static constexpr std::array<double, 12> c{0.0,
                                            0.526001519587677318785587544488e-01,
                                            0.789002279381515978178381316732e-01,
                                            0.118350341907227396726757197510e+00,
                                            0.281649658092772603273242802490e+00,
                                            0.333333333333333333333333333333e+00,
                                            0.25e+00,
                                            0.307692307692307692307692307692e+00,
                                            0.651282051282051282051282051282e+00,
                                            0.6e+00,
                                            0.857142857142857142857142857142e+00,
                                            1.0};
  static constexpr std::array<std::array<double, 11>, 12> a{{
      {},
      {5.26001519587677318785587544488e-2},
      {1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2},
      {2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2},
      {2.41365134159266685502369798665e-1, 0.0, -8.84549479328286085344864962717e-1,
       9.24834003261792003115737966543e-1},
      {3.7037037037037037037037037037e-2, 0.0, 0.0, 1.70828608729473871279604482173e-1,
       1.25467687566822425016691814123e-1},
      {3.7109375e-2, 0.0, 0.0, 1.70252211019544039314978060272e-1, 6.02165389804559606850219397283e-2,
       -1.7578125e-2},
      {3.70920001185047927108779319836e-2, 0.0, 0.0, 1.70383925712239993810214054705e-1,
       1.07262030446373284651809199168e-1, -1.53194377486244017527936158236e-2,
       8.27378916381402288758473766002e-3},
      {6.24110958716075717114429577812e-1, 0.0, 0.0, -3.36089262944694129406857109825e0,
       -8.68219346841726006818189891453e-1, 2.75920996994467083049415600797e1, 2.01540675504778934086186788979e1,
       -4.34898841810699588477366255144e1},
      {4.77662536438264365890433908527e-1, 0.0, 0.0, -2.48811461997166764192642586468e0,
       -5.90290826836842996371446475743e-1, 2.12300514481811942347288949897e1, 1.52792336328824235832596922938e1,
       -3.32882109689848629194453265587e1, -2.03312017085086261358222928593e-2},
      {-9.3714243008598732571704021658e-1, 0.0, 0.0, 5.18637242884406370830023853209e0,
       1.09143734899672957818500254654e0, -8.14978701074692612513997267357e0, -1.85200656599969598641566180701e1,
       2.27394870993505042818970056734e1, 2.49360555267965238987089396762e0, -3.0467644718982195003823669022e0},
      {2.27331014751653820792359768449e0, 0.0, 0.0, -1.05344954667372501984066689879e1,
       -2.00087205822486249909675718444e0, -1.79589318631187989172765950534e1, 2.79488845294199600508499808837e1,
       -2.85899827713502369474065508674e0, -8.87285693353062954433549289258e0, 1.23605671757943030647266201528e1,
       6.43392746015763530355970484046e-1},
  }};
  static constexpr std::array<double, 12> b{5.42937341165687622380535766363e-2, 0.0, 0.0, 0.0, 0.0,
                                            4.45031289275240888144113950566e0, 1.89151789931450038304281599044e0,
                                            -5.8012039600105847814672114227e0, 3.1116436695781989440891606237e-1,
                                            -1.52160949662516078556178806805e-1, 2.01365400804030348374776537501e-1,
                                            4.47106157277725905176885569043e-2};
  // Third-order comparison weights on stages 1, 9, 12.
  static constexpr double e31 = 0.244094488188976377952755905512e+00;
  static constexpr double e39 = 0.733846688281611857341361741547e+00;
  static constexpr double e312 = 0.220588235294117647058823529412e-01;
  static constexpr std::array<double, 12> e5{0.1312004499419488073250102996e-01, 0.0, 0.0, 0.0, 0.0,
                                             -0.1225156446376204440720569753e+01, -0.4957589496572501915214079952e+00,
                                             0.1664377182454986536961530415e+01, -0.3503288487499736816886487290e+00,
                                             0.3341791187130174790297318841e+00, 0.8192320648511571246570742613e-01,
                                             -0.2235530786388629525884427845e-01};
};

using State = std::array<long double, 2>;

// Local error target as a fraction of the requested tolerance, so that the
// accumulated error at b stays below it even at large omega.
inline constexpr double kLocalTolFraction = 1e-5;

// Adaptive DOP853 for a 2x2 first-order system from x0 to x1, stopping exactly
// at every requested output point. rhs(x, y) returns y'. The state is carried
// in long double.
template <class Rhs, class Sink>
void integrate_dop853(Rhs&& rhs, State y, double x0, double x1, const std::vector<double>& stops, double tol,
                      double h0, OracleResult& res, Sink&& sink) {
  const long double local_tol = tol * kLocalTolFraction;
  constexpr double safe = 0.9;
  constexpr double fac_min = 0.333;
  constexpr double fac_max = 6.0;
  const double h_min = 1e-15 * std::max(1.0, std::abs(x1));
  std::size_t next = 0;
  while (next < stops.size() && stops[next] <= x0) ++next;
  long double x = x0;
  long double h = std::min(h0, x1 - x0);
  std::array<State, 12> k{};
  while (x < x1) {
    const long double target = next < stops.size() ? std::min(stops[next], x1) : x1;
    const bool hits = x + h >= target;
    const long double step = hits ? target - x : h;
    for (int s = 0; s < 12; ++s) {
      State ys = y;
      for (int j = 0; j < s; ++j) {
        const double aij = Dop853::a[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
        if (aij == 0.0) continue;
        ys[0] += step * aij * k[static_cast<std::size_t>(j)][0];
        ys[1] += step * aij * k[static_cast<std::size_t>(j)][1];
      }
      k[static_cast<std::size_t>(s)] = rhs(x + Dop853::c[static_cast<std::size_t>(s)] * step, ys);
    }
    State y_new = y;
    long double err3 = 0.0;
    long double err5 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      long double incr = 0.0;
      long double e5 = 0.0;
      for (std::size_t s = 0; s < 12; ++s) {
        incr += Dop853::b[s] * k[s][ii];
        e5 += Dop853::e5[s] * k[s][ii];
      }
      y_new[ii] = y[ii] + step * incr;
      const long double e3 = incr - Dop853::e31 * k[0][ii] - Dop853::e39 * k[8][ii] - Dop853::e312 * k[11][ii];
      const long double scale = local_tol * (1.0L + std::max(std::abs(y[ii]), std::abs(y_new[ii])));
      err3 += (e3 / scale) * (e3 / scale);
      err5 += (e5 / scale) * (e5 / scale);
    }
    const long double denom = err5 + 0.01L * err3;
    const double err = denom > 0.0L ? static_cast<double>(step * err5 / std::sqrt(2.0L * denom)) : 0.0;
    if (!std::isfinite(err)) throw NumericalError("oracle failed: non-finite error estimate");
    if (err <= 1.0) {
      x = hits ? target : x + step;
      y = y_new;
      ++res.steps;
      res.error_bound = std::max(res.error_bound, err * static_cast<double>(local_tol));
      if (hits && next < stops.size() && target == stops[next]) {
        sink(static_cast<double>(x), y);
        ++next;
      }
      const double fac = err == 0.0 ? fac_max : std::clamp(safe * std::pow(err, -0.125), fac_min, fac_max);
      if (!hits || step >= h) h *= fac;
    } else {
      h = std::max(fac_min, safe * std::pow(err, -0.125)) * step;
      if (h < h_min) throw NumericalError("oracle failed: step size underflow");
    }
  }
}

}  // namespace detail

/// u(omega, x) and u'(omega, x) at the requested points by integrating the
/// equation directly (no series, no grid). Near the origin the unknown is
/// v = u / x^{l+1} with v(0) = 1, v'(0) = 0 and the removable limit
/// v''(0) = (q(0) - omega^2)/(2l+3); once omega x reaches 1 the integration
/// continues on (u, u') where the amplitude is O(1). The result carries the
/// normalization u ~ sqrt(pi) (omega x)^{l+1} / (2^{l+1} Gamma(l+3/2)).
inline OracleResult oracle_solution(const Problem& problem, double omega, double tol,
                                    std::vector<double> points = {}) {
  problem.validate();
  if (!(tol >= 1e-13)) throw ConfigError("oracle: tolerance must be >= 1e-13");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("oracle: omega must be finite and >= 0");
  const double b = problem.b;
  if (points.empty()) points.push_back(b);
  std::sort(points.begin(), points.end());
  for (double p : points) {
    if (!(p > 0.0) || p > b) throw ConfigError("oracle: output points must lie in (0, b]");
  }
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double ell = problem.ell;
  const Potential& q = problem.q;
  const double w2 = omega * omega;
  const long double w2l = static_cast<long double>(omega) * omega;
  const double kappa = 2.0 * ell + 2.0;
  const std::optional<double> q0 = q.value_at_zero();
  const bool singular_power = !q0 && q.kind() == Potential::Kind::Power;
  if (!q0 && !singular_power) throw ConfigError("oracle: potential needs a finite value at 0");

  OracleResult res;
  res.omega = omega;
  res.x = points;
  res.u.assign(points.size(), 0.0);
  res.du.assign(points.size(), 0.0);
  if (omega == 0.0) return res;

  const double log_norm = 0.5 * std::log(std::numbers::pi) + (ell + 1.0) * std::log(omega) -
                          (ell + 1.0) * std::log(2.0) - std::lgamma(ell + 1.5);
  const double norm = std::exp(log_norm);

  // Phase 1: v on [start, switch_at].
  double start = 0.0;
  detail::State y{1.0, 0.0};
  if (singular_power) {
    // q = c x^p with -1 < p < 0: two-term expansion at a tiny offset.
    const double c = q.power_coefficient();
    const double p = q.power_exponent();
    start = 1e-9 * b;
    const double s2 = p + 2.0;
    const double aq = c / (s2 * (s2 + 2.0 * ell + 1.0));
    const double aw = -w2 / (2.0 * (2.0 * ell + 3.0));
    y = {1.0 + aq * std::pow(start, s2) + aw * start * start, aq * s2 * std::pow(start, s2 - 1.0) + 2.0 * aw * start};
  }
  const double switch_at = std::min(b, std::max(1.0 / omega, start));
  auto v_rhs = [&](long double x, const detail::State& s) -> detail::State {
    if (x == 0.0L) return {s[1], (*q0 - w2l) * s[0] / (2.0L * ell + 3.0L)};
    return {s[1], (q(static_cast<double>(x)) - w2l) * s[0] - kappa * s[1] / x};
  };
  std::size_t out = 0;
  auto v_sink = [&](double x, const detail::State& s) {
    const double scale = norm * std::pow(x, ell);
    res.u[out] = scale * x * s[0];
    res.du[out] = scale * ((ell + 1.0) * s[0] + x * s[1]);
    ++out;
  };
  std::vector<double> first_stops;
  for (double p : points) {
    if (p <= switch_at) first_stops.push_back(p);
  }
  if (first_stops.empty() || first_stops.back() != switch_at) first_stops.push_back(switch_at);
  double x_sw = switch_at;
  detail::State at_switch = y;
  detail::integrate_dop853(v_rhs, y, start, switch_at, first_stops, tol, 1e-3 * switch_at, res,
                           [&](double x, const detail::State& s) {
                             if (out < points.size() && x == points[out]) v_sink(x, s);
                             if (x == switch_at) at_switch = s;
                           });
  if (x_sw >= b) return res;

  // Phase 2: (u, u') on [switch_at, b].
  const double scale = norm * std::pow(x_sw, ell);
  detail::State uy{scale * x_sw * at_switch[0], scale * ((ell + 1.0) * at_switch[0] + x_sw * at_switch[1])};
  const double centrifugal = ell * (ell + 1.0);
  auto u_rhs = [&](long double x, const detail::State& s) -> detail::State {
    return {s[1], (centrifugal / (x * x) + q(static_cast<double>(x)) - w2l) * s[0]};
  };
  std::vector<double> second_stops(points.begin() + static_cast<std::ptrdiff_t>(out), points.end());
  detail::integrate_dop853(u_rhs, uy, x_sw, b, second_stops, tol, 0.1 / omega, res,
                           [&](double, const detail::State& s) {
                             res.u[out] = s[0];
                             res.du[out] = s[1];
                             ++out;
                           });
  return res;
}

/// Shooting eigenvalues on [omega_min, omega_max]: sign changes of the oracle
/// boundary functional on a uniform scan, each refined with TOMS 748.
inline std::vector<double> oracle_eigenvalues(const Problem& problem, const BoundaryCondition& bc, double omega_max,
                                              double step, double tol, double omega_min = 1e-3) {
  if (!(omega_max > omega_min) || !(step > 0.0)) throw ConfigError("oracle: need omega_max > omega_min and step > 0");
  auto f = [&](double w) {
    const OracleResult r = oracle_solution(problem, w, tol);
    return bc(r.u[0], r.du[0]);
  };
  std::vector<double> roots;
  double lo = omega_min;
  double flo = f(lo);
  while (lo < omega_max) {
    const double hi = std::min(lo + step, omega_max);
    const double fhi = f(hi);
    if (flo == 0.0) {
      roots.push_back(lo);
    } else if ((flo < 0.0) != (fhi < 0.0) && fhi != 0.0) {
      std::uintmax_t iters = 200;
      const boost::math::tools::eps_tolerance<double> stop(std::numeric_limits<double>::digits - 2);
      const auto [a, c] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
      roots.push_back(0.5 * (a + c));
    }
    lo = hi;
    flo = fhi;
  }
  return roots;
}

}  // namespace nsbf

#endif  // NSBF_ORACLE_HPP
