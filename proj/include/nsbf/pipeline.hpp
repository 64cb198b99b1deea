#ifndef NSBF_PIPELINE_HPP
#define NSBF_PIPELINE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "nsbf/coefficients.hpp"
#include "nsbf/error.hpp"
#include "nsbf/evaluator.hpp"
#include "nsbf/particular_solution.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

/// Index where |c_n| first comes within a factor 10 of its smallest value over
/// n >= 1. Used for gamma when q(0) is unbounded and no identity is available.
inline int select_plateau(std::span<const double> magnitudes) {
  if (magnitudes.empty()) throw ConfigError("select_plateau: empty sequence");
  if (magnitudes.size() == 1) return 0;
  double floor = std::abs(magnitudes[1]);
  for (std::size_t n = 2; n < magnitudes.size(); ++n) floor = std::min(floor, std::abs(magnitudes[n]));
  for (std::size_t n = 1; n < magnitudes.size(); ++n) {
    if (std::abs(magnitudes[n]) <= 10.0 * floor) return static_cast<int>(n);
  }
  return static_cast<int>(magnitudes.size()) - 1;
}

struct PipelineOptions {
  int n_max = 40;          // orders computed when N is chosen automatically
  std::optional<int> n1;   // fixed beta truncation
  std::optional<int> n2;   // fixed gamma truncation
};

/// Everything needed to evaluate u_N and u'_N for one problem.
struct Pipeline {
  Problem problem;
  ParticularSolution particular;
  CoefficientSet coefficients;
  int n1 = 0;
  int n2 = 0;
  bool n1_auto = false;
  bool n2_auto = false;

  SeriesEvaluator evaluator(double x, bool derivative = true) const {
    return SeriesEvaluator(coefficients, x, n1, derivative ? n2 : -1);
  }
  SeriesEvaluator evaluator_at_b(bool derivative = true) const { return evaluator(problem.b, derivative); }

  double beta_residual() const { return coefficients.beta_residuals[static_cast<std::size_t>(n1)]; }
  std::optional<double> gamma_residual() const {
    if (coefficients.gamma_residuals.empty()) return std::nullopt;
    return coefficients.gamma_residuals[static_cast<std::size_t>(n2)];
  }
};

inline Pipeline build_pipeline(const Problem& problem, const PipelineOptions& opt = {}) {
  problem.validate();
  if (opt.n_max < 0) throw ConfigError("pipeline: n_max must be non-negative");
  if (opt.n1 && *opt.n1 < 0) throw ConfigError("pipeline: N1 must be non-negative");
  if (opt.n2 && *opt.n2 < 0) throw ConfigError("pipeline: N2 must be non-negative");
  // Automatic orders search 0..n_max; a fixed N1 also bounds an automatic N2.
  const int gamma_count = opt.n2.value_or(opt.n1.value_or(opt.n_max));
  const int beta_count = std::max(opt.n1.value_or(opt.n_max), gamma_count);

  ParticularSolution particular = ensure_nonvanishing(problem);
  CoefficientSet cs = gamma_coefficients(beta_coefficients(particular, problem.q, beta_count), particular, gamma_count);
  Pipeline p{problem, std::move(particular), std::move(cs), 0, 0, !opt.n1, !opt.n2};

  p.n1 = opt.n1 ? *opt.n1 : select_truncation(p.coefficients.beta_residuals);
  if (opt.n2) {
    p.n2 = *opt.n2;
  } else if (!p.coefficients.gamma_residuals.empty()) {
    p.n2 = select_truncation(p.coefficients.gamma_residuals);
  } else {
    std::vector<double> at_b;
    for (const auto& g : p.coefficients.gamma) at_b.push_back(g.back());
    p.n2 = select_plateau(at_b);
  }
  return p;
}

}  // namespace nsbf

#endif  // NSBF_PIPELINE_HPP
