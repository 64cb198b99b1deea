#ifndef NSBF_PROBLEM_HPP
#define NSBF_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsbf/error.hpp"
#include "nsbf/grid.hpp"

namespace nsbf {

/// The potential q of the perturbed Bessel equation.
///
/// Either an analytic builtin (evaluable anywhere on (0, b]) or samples on a
/// grid, in which case off-node values come from the local degree-5
/// interpolant of the 6-node block containing the point.
class Potential {
 public:
  enum class Kind { Zero, Power, Ex1, Qm, Sampled, Custom };

  static Potential zero() { return Potential(Kind::Zero, "zero"); }

  /// q(x) = c * x^p, p > -1.
  static Potential power(double c, double p) {
    if (!std::isfinite(c) || !std::isfinite(p)) throw ConfigError("potential power: c and p must be finite");
    if (!(p > -1.0)) throw ConfigError("potential power: exponent p must exceed -1 for integrability");
    Potential q(Kind::Power, "power");
    q.c_ = c;
    q.p_ = p;
    return q;
  }

  /// q(x) = x^2.
  static Potential ex1() { return Potential(Kind::Ex1, "ex1"); }

  /// q_m(x) = 1 on [0, pi/2], 1 + (x - pi/2)^m beyond; m = 0..5.
  static Potential qm(int m) {
    if (m < 0 || m > 5) throw ConfigError("potential qm: m must be in 0..5, got " + std::to_string(m));
    Potential q(Kind::Qm, "qm");
    q.m_ = m;
    return q;
  }

  static Potential sampled(GridFunction samples) {
    if (!samples.all_finite()) throw ConfigError("potential file: samples must be finite at every node");
    Potential q(Kind::Sampled, "file");
    q.samples_ = std::make_shared<const GridFunction>(std::move(samples));
    return q;
  }

  /// Arbitrary analytic potential; q0 is its limit at 0 if finite.
  static Potential custom(std::string name, std::function<double(double)> f, std::optional<double> q0) {
    Potential q(Kind::Custom, std::move(name));
    q.fn_ = std::move(f);
    q.q0_ = q0;
    return q;
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Zero:
        return 0.0;
      case Kind::Power:
        if (p_ == 0.0) return c_;
        return c_ * std::pow(x, p_);
      case Kind::Ex1:
        return x * x;
      case Kind::Qm: {
        constexpr double half_pi = std::numbers::pi / 2;
        if (x <= half_pi) return 1.0;
        return 1.0 + (m_ == 0 ? 1.0 : std::pow(x - half_pi, m_));
      }
      case Kind::Sampled:
        return interpolate(x);
      case Kind::Custom:
        return fn_(x);
    }
    return 0.0;
  }

  /// lim_{x->0+} q(x), or nullopt if unbounded.
  std::optional<double> value_at_zero() const {
    switch (kind_) {
      case Kind::Zero:
      case Kind::Ex1:
        return 0.0;
      case Kind::Power:
        if (p_ > 0.0) return 0.0;
        if (p_ == 0.0) return c_;
        if (c_ == 0.0) return 0.0;
        return std::nullopt;
      case Kind::Qm:
        return 1.0;
      case Kind::Sampled:
        return (*samples_)[0];
      case Kind::Custom:
        return q0_;
    }
    return std::nullopt;
  }

  /// Samples on a grid; node 0 holds the limit at 0 (0 if unbounded).
  GridFunction sample(const Grid& grid) const {
    if (kind_ == Kind::Sampled) {
      if (!(samples_->grid() == grid)) throw ConfigError("potential file: samples do not live on the problem grid");
      return *samples_;
    }
    GridFunction g(grid);
    g[0] = value_at_zero().value_or(0.0);
    for (std::size_t i = 1; i < g.size(); ++i) g[i] = (*this)(grid.node(i));
    return g;
  }

  /// Q(x) = integral of q over [0, x] at every node.
  GridFunction integral(const Grid& grid) const {
    if (kind_ == Kind::Power && p_ < 0.0) {
      return GridFunction::sample(grid, [this](double x) { return c_ * std::pow(x, p_ + 1.0) / (p_ + 1.0); });
    }
    if (!value_at_zero()) {
      throw ConfigError("potential '" + name_ + "': unbounded at 0 without a closed-form antiderivative");
    }
    return cumulative_integral(sample(grid));
  }

  /// True for potentials given by samples rather than a formula.
  bool is_sampled() const noexcept { return kind_ == Kind::Sampled; }

  double power_coefficient() const noexcept { return c_; }
  double power_exponent() const noexcept { return p_; }
  int qm_order() const noexcept { return m_; }

 private:
  Potential(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  double interpolate(double x) const {
    const GridFunction& s = *samples_;
    const Grid& g = s.grid();
    const double h = g.step();
    const double pos = std::clamp(x / h, 0.0, static_cast<double>(g.intervals()));
    auto block = static_cast<std::size_t>(pos / 5.0);
    if (block * 5 >= static_cast<std::size_t>(g.intervals())) block = static_cast<std::size_t>(g.intervals()) / 5 - 1;
    const std::size_t first = block * 5;
    const double t = pos - static_cast<double>(first);
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
      double li = 1.0;
      for (int k = 0; k < 6; ++k) {
        if (k != i) li *= (t - k) / static_cast<double>(i - k);
      }
      sum += li * s[first + static_cast<std::size_t>(i)];
    }
    return sum;
  }

  Kind kind_;
  std::string name_;
  double c_ = 0.0;
  double p_ = 0.0;
  int m_ = 0;
  std::shared_ptr<const GridFunction> samples_;
  std::function<double(double)> fn_;
  std::optional<double> q0_;
};

/// Condition a u(b) + c u'(b) = 0 at the right endpoint.
struct BoundaryCondition {
  enum class Kind { Dirichlet, Neumann, Robin };
  Kind kind = Kind::Dirichlet;
  double a = 1.0;
  double c = 0.0;

  static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 1.0, 0.0}; }
  static BoundaryCondition neumann() { return {Kind::Neumann, 0.0, 1.0}; }
  static BoundaryCondition robin(double a, double c) {
    if (!std::isfinite(a) || !std::isfinite(c) || (a == 0.0 && c == 0.0)) {
      throw ConfigError("boundary condition: robin weights (a, c) must be finite and not both zero");
    }
    return {Kind::Robin, a, c};
  }

  double operator()(double u, double du) const { return a * u + c * du; }
  bool needs_derivative() const noexcept { return c != 0.0; }

  std::string name() const {
    switch (kind) {
      case Kind::Dirichlet:
        return "dirichlet";
      case Kind::Neumann:
        return "neumann";
      case Kind::Robin:
        return "robin";
    }
    return "?";
  }
};

/// The perturbed Bessel equation -u'' + (l(l+1)/x^2 + q(x)) u = omega^2 u on (0, b].
struct Problem {
  double ell = 0.0;
  double b = std::numbers::pi;
  Potential q = Potential::zero();
  double mu = 0.0;  // declared regularity: x^mu q(x) integrable
  int intervals = Grid::kDefaultIntervals;

  Grid grid() const { return make_grid(b, intervals); }

  void validate() const {
    if (!(ell >= -0.5) || !std::isfinite(ell)) {
      throw ConfigError("problem: ell must satisfy ell >= -1/2 (got " + std::to_string(ell) + ")");
    }
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("problem: b must be positive");
    if (!(mu >= 0.0 && mu < 0.5)) throw ConfigError("problem: mu must lie in [0, 1/2)");
    (void)grid();
    if (q.is_sampled()) (void)q.sample(grid());
  }
};

}  // namespace nsbf

#endif  // NSBF_PROBLEM_HPP
