#ifndef NSBF_EVALUATOR_HPP
#define NSBF_EVALUATOR_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsbf/coefficients.hpp"
#include "nsbf/error.hpp"
#include "nsbf/special_functions.hpp"

namespace nsbf {

/// Values of the regular solution and its derivative at one (omega, x).
struct SolutionValue {
  double u = 0.0;
  double du = 0.0;
};

/// Truncated series u_N(omega, x) and u'_N(omega, x) at a fixed x.
///
/// The coefficients at x are extracted once; each evaluation costs one Bessel
/// ladder. When the coefficients belong to a shifted potential q + shift, the
/// series is summed at sqrt(omega^2 + shift) and rescaled so that the result
/// keeps the normalization u ~ sqrt(pi) (omega x)^{l+1} / (2^{l+1} Gamma(l+3/2)).
/// Instances are immutable and safe to share between threads.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const CoefficientSet& cs, double x, int n1, int n2)
      : ell_(cs.ell), shift_(cs.shift), x_(x), n1_(n1), n2_(n2) {
    const Grid& grid = cs.grid();
    if (!(x > 0.0) || x > grid.b() * (1.0 + 1e-14)) {
      throw ConfigError("evaluator: x must lie in (0, b]");
    }
    if (n1 < 0 || n1 > cs.beta_order()) {
      throw ConfigError("evaluator: N1 = " + std::to_string(n1) + " outside available beta orders 0.." +
                        std::to_string(cs.beta_order()));
    }
    if (n2 > cs.gamma_order()) {
      throw ConfigError("evaluator: N2 = " + std::to_string(n2) + " outside available gamma orders 0.." +
                        std::to_string(cs.gamma_order()));
    }
    // Linear interpolation between the neighbouring nodes when x is off-grid.
    std::size_t lo = grid.find_node(x);
    double frac = 0.0;
    if (lo == Grid::npos) {
      const double pos = x / grid.step();
      lo = static_cast<std::size_t>(pos);
      if (lo >= grid.size() - 1) lo = grid.size() - 2;
      frac = pos - static_cast<double>(lo);
    }
    auto at = [&](const GridFunction& f) {
      return frac == 0.0 ? f[lo] : (1.0 - frac) * f[lo] + frac * f[lo + 1];
    };
    for (int n = 0; n <= n1; ++n) beta_.push_back(at(cs.beta[static_cast<std::size_t>(n)]));
    for (int n = 0; n <= n2; ++n) gamma_.push_back(at(cs.gamma[static_cast<std::size_t>(n)]));
    q_integral_ = at(cs.Q);
    ladder_orders_ = 2 * std::max(n1, std::max(n2, 0)) + 4;
  }

  double x() const noexcept { return x_; }
  double ell() const noexcept { return ell_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  bool has_derivative() const noexcept { return n2_ >= 0; }

  SolutionValue operator()(double omega) const {
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("evaluator: omega must be finite and >= 0");
    if (omega == 0.0) return {};
    const double om = shift_ == 0.0 ? omega : std::sqrt(omega * omega + shift_);
    const double z = om * x_;
    std::vector<double> j(static_cast<std::size_t>(ladder_orders_));
    detail::spherical_bessel_range(ell_ - 1.0, z, j);

    SolutionValue r;
    r.u = om * x_ * j[1];
    for (std::size_t n = 0; n < beta_.size(); ++n) r.u += beta_[n] * j[2 * n + 2];
    if (has_derivative()) {
      r.du = om * om * x_ * j[0] + (x_ * q_integral_ / 2.0 - ell_) * om * j[1];
      for (std::size_t n = 0; n < gamma_.size(); ++n) r.du += gamma_[n] * j[2 * n + 2];
    }
    if (shift_ != 0.0) {
      const double scale = std::pow(omega / om, ell_ + 1.0);
      r.u *= scale;
      r.du *= scale;
    }
    return r;
  }

 private:
  double ell_;
  double shift_;
  double x_;
  int n1_;
  int n2_;
  int ladder_orders_ = 4;
  double q_integral_ = 0.0;
  std::vector<double> beta_;
  std::vector<double> gamma_;
};

/// A batch evaluation at one point x for several omegas.
struct EvaluationRequest {
  const CoefficientSet* coefficients = nullptr;
  double x = 0.0;
  std::vector<double> omegas;
  int n1 = 0;
  int n2 = 0;
};

inline std::vector<SolutionValue> evaluate(const EvaluationRequest& req) {
  if (req.coefficients == nullptr) throw ConfigError("evaluate: missing coefficient set");
  const SeriesEvaluator ev(*req.coefficients, req.x, req.n1, req.n2);
  std::vector<SolutionValue> out;
  out.reserve(req.omegas.size());
  for (double w : req.omegas) out.push_back(ev(w));
  return out;
}

/// u_N(omega, x) for each requested omega.
inline std::vector<double> evaluate_u(const EvaluationRequest& req) {
  if (req.coefficients == nullptr) throw ConfigError("evaluate_u: missing coefficient set");
  const SeriesEvaluator ev(*req.coefficients, req.x, req.n1, -1);
  std::vector<double> out;
  out.reserve(req.omegas.size());
  for (double w : req.omegas) out.push_back(ev(w).u);
  return out;
}

/// u'_N(omega, x) for each requested omega.
inline std::vector<double> evaluate_du(const EvaluationRequest& req) {
  std::vector<double> out;
  out.reserve(req.omegas.size());
  for (const auto& v : evaluate(req)) out.push_back(v.du);
  return out;
}

}  // namespace nsbf

#endif  // NSBF_EVALUATOR_HPP
