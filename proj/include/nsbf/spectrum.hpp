#ifndef NSBF_SPECTRUM_HPP
#define NSBF_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nsbf/coefficients.hpp"
#include "nsbf/error.hpp"
#include "nsbf/evaluator.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

inline constexpr double kOmegaMin = 1e-3;

/// Sorted eigenvalues with the data of the scan that produced them.
struct Spectrum {
  std::vector<double> eigenvalues;
  // |F(omega_n)| relative to the larger |F| at the ends of its scan bracket.
  std::vector<double> residuals;
  BoundaryCondition bc;
  double omega_min = kOmegaMin;
  double omega_max = 0.0;
  double step = 0.0;
  long evaluations = 0;
  long refinement_iterations = 0;
  std::vector<std::string> warnings;
};

struct ScanOptions {
  double omega_min = kOmegaMin;
  double omega_max = std::numeric_limits<double>::infinity();
  double step = 0.0;       // 0 selects pi/(8b)
  std::size_t count = 0;   // stop after this many eigenvalues (0: no limit)
  double rel_tol = 0.0;    // bracket width relative to max(1, omega); 0 bisects to adjacent doubles
};

/// u_N(omega, b), u'_N(omega, b) or a u_N + c u'_N, depending on the condition.
inline double characteristic(const SeriesEvaluator& ev, const BoundaryCondition& bc, double omega) {
  const SolutionValue s = ev(omega);
  return bc(s.u, s.du);
}

/// Scan [omega_min, omega_max] for sign changes of the characteristic
/// function and bisect each bracket.
inline Spectrum find_eigenvalues(const CoefficientSet& cs, const BoundaryCondition& bc, int n1, int n2,
                                 const ScanOptions& opt) {
  const double b = cs.grid().b();
  Spectrum sp;
  sp.bc = bc;
  sp.omega_min = opt.omega_min;
  sp.step = opt.step > 0.0 ? opt.step : std::numbers::pi / (8.0 * b);
  if (!(opt.omega_min > 0.0)) throw ConfigError("eigs: omega_min must be positive");
  if (opt.count == 0 && !std::isfinite(opt.omega_max)) throw ConfigError("eigs: give omega_max or count");
  if (!(opt.omega_max > opt.omega_min + sp.step) && std::isfinite(opt.omega_max)) {
    throw ConfigError("eigs: need omega_max > omega_min + scan step");
  }
  if (sp.step > std::numbers::pi / (4.0 * b)) {
    sp.warnings.push_back("scan step exceeds pi/(4b); closely spaced eigenvalues may be missed");
  }
  if (bc.needs_derivative() && n2 < 0) throw ConfigError("eigs: boundary condition needs the derivative (N2)");
  const SeriesEvaluator ev(cs, b, n1, bc.needs_derivative() ? n2 : -1);
  auto f = [&](double w) {
    ++sp.evaluations;
    return characteristic(ev, bc, w);
  };

  double lo = opt.omega_min;
  double flo = f(lo);
  for (long k = 1;; ++k) {
    if (opt.count > 0 && sp.eigenvalues.size() >= opt.count) break;
    if (lo >= opt.omega_max) break;
    const double hi = std::min(opt.omega_min + static_cast<double>(k) * sp.step, opt.omega_max);
    const double fhi = f(hi);
    if (flo != 0.0 && fhi != 0.0 && (flo < 0.0) == (fhi < 0.0)) {
      lo = hi;
      flo = fhi;
      continue;
    }
    double a = lo;
    double c = hi;
    double fa = flo;
    double root = flo == 0.0 ? lo : hi;
    if (flo != 0.0 && fhi != 0.0) {
      while (c - a > opt.rel_tol * std::max(1.0, a)) {
        const double m = 0.5 * (a + c);
        if (m <= a || m >= c) break;
        const double fm = f(m);
        ++sp.refinement_iterations;
        if (fm == 0.0) {
          a = c = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          c = m;
        }
      }
      root = 0.5 * (a + c);
    }
    if (sp.eigenvalues.empty() || root - sp.eigenvalues.back() > 0.5 * sp.step) {
      const double scale = std::max(std::abs(flo), std::abs(fhi));
      sp.eigenvalues.push_back(root);
      sp.residuals.push_back(scale > 0.0 ? std::abs(f(root)) / scale : 0.0);
    }
    lo = hi;
    flo = fhi;
  }
  sp.omega_max = lo;
  return sp;
}

}  // namespace nsbf

#endif  // NSBF_SPECTRUM_HPP
