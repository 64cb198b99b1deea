#ifndef NSBF_GRID_HPP
#define NSBF_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nsbf/error.hpp"

namespace nsbf {

/// Uniform mesh x_i = i*b/M, i = 0..M, on [0, b].
///
/// M must be a multiple of 5 so that the mesh splits into whole blocks of the
/// 6-point Newton-Cotes rule used by cumulative_integral().
class Grid {
 public:
  static constexpr int kDefaultIntervals = 5000;

  Grid(double b, int intervals) : b_(b), intervals_(intervals) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw ConfigError("grid: right endpoint b must be positive and finite");
    }
    if (intervals < 5 || intervals % 5 != 0) {
      throw ConfigError("grid: number of subintervals M must be a positive multiple of 5, got " +
                        std::to_string(intervals));
    }
  }

  double b() const noexcept { return b_; }
  int intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(intervals_) + 1; }
  double step() const noexcept { return b_ / intervals_; }

  /// Node i; the last node is exactly b.
  double node(std::size_t i) const noexcept {
    return i == static_cast<std::size_t>(intervals_) ? b_ : static_cast<double>(i) * b_ / intervals_;
  }

  std::vector<double> nodes() const {
    std::vector<double> x(size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = node(i);
    return x;
  }

  /// Sub-mesh [0, x_m] sharing the first m+1 nodes (m a multiple of 5).
  Grid prefix(int m) const {
    if (m < 5 || m > intervals_ || m % 5 != 0) {
      throw ConfigError("grid: prefix length must be a multiple of 5 within the mesh");
    }
    Grid g(node(static_cast<std::size_t>(m)), m);
    return g;
  }

  /// Index of the node equal to x (within 1e-12 relative), or npos.
  std::size_t find_node(double x) const noexcept {
    const double s = x / step();
    const double r = std::round(s);
    if (r < 0.0 || r > intervals_) return npos;
    if (std::abs(s - r) > 1e-9) return npos;
    return static_cast<std::size_t>(r);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  double b_;
  int intervals_;
};

inline Grid make_grid(double b, int intervals) {
  if (intervals < 6) {
    throw ConfigError("grid: M must be at least 6 (got " + std::to_string(intervals) + ")");
  }
  return Grid(b, intervals);
}

/// Real samples of a function on the nodes of a Grid.
class GridFunction {
 public:
  explicit GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

  GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ConfigError("grid function: expected " + std::to_string(grid_.size()) + " samples, got " +
                        std::to_string(values_.size()));
    }
  }

  /// Samples f at every node.
  template <typename F>
  static GridFunction sample(const Grid& grid, F&& f) {
    GridFunction g(grid);
    for (std::size_t i = 0; i < g.size(); ++i) g.values_[i] = f(grid.node(i));
    return g;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double back() const noexcept { return values_.back(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

namespace detail {

// Weights (times 1440) integrating the degree-5 Lagrange interpolant on nodes
// 0..5 (unit spacing) from 0 to node j, j = 1..5. Row 5 is the closed 6-point
// Newton-Cotes rule.
inline constexpr std::array<std::array<double, 6>, 5> kBlockWeights{{
    {{475.0, 1427.0, -798.0, 482.0, -173.0, 27.0}},
    {{448.0, 2064.0, 224.0, 224.0, -96.0, 16.0}},
    {{459.0, 1971.0, 1026.0, 1026.0, -189.0, 27.0}},
    {{448.0, 2048.0, 768.0, 2048.0, 448.0, 0.0}},
    {{475.0, 1875.0, 1250.0, 1250.0, 1875.0, 475.0}},
}};

/// out[i] = integral of f from node 0 to node i; f.size()-1 must be a multiple of 5.
inline void cumulative_integral(std::span<const double> f, double h, std::span<double> out) {
  const std::size_t blocks = (f.size() - 1) / 5;
  const double scale = h / 1440.0;
  out[0] = 0.0;
  double base = 0.0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const double* fb = f.data() + 5 * k;
    for (std::size_t j = 0; j < 5; ++j) {
      const auto& w = kBlockWeights[j];
      double s = 0.0;
      for (std::size_t i = 0; i < 6; ++i) s += w[i] * fb[i];
      out[5 * k + j + 1] = base + scale * s;
    }
    base = out[5 * k + 5];
  }
}

inline double definite_integral(std::span<const double> f, double h) {
  const std::size_t blocks = (f.size() - 1) / 5;
  const auto& w = kBlockWeights[4];
  double total = 0.0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const double* fb = f.data() + 5 * k;
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += w[i] * fb[i];
    total += s;
  }
  return total * h / 1440.0;
}

}  // namespace detail

/// g(x_i) = integral of f over [0, x_i], piecewise from degree-5 interpolants of
/// each 5-interval block; exact for polynomials of degree <= 5.
inline GridFunction cumulative_integral(const GridFunction& f) {
  if (!f.all_finite()) throw ConfigError("cumulative_integral: integrand has non-finite samples");
  GridFunction g(f.grid());
  detail::cumulative_integral(f.values(), f.grid().step(), g.values());
  return g;
}

inline double definite_integral(const GridFunction& f) {
  if (!f.all_finite()) throw ConfigError("definite_integral: integrand has non-finite samples");
  return detail::definite_integral(f.values(), f.grid().step());
}

/// Headerless two-column CSV "x,value" with 17 significant digits.
inline void write_csv(std::ostream& os, const GridFunction& f) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    line.str("");
    line << f.grid().node(i) << ',' << f[i] << '\n';
    os << line.str();
  }
}

/// Reads samples written by write_csv(); the x column must match the grid nodes.
inline GridFunction read_csv(std::istream& is, const Grid& grid) {
  std::vector<double> values;
  values.reserve(grid.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected two comma-separated columns");
    }
    double x = 0.0;
    double v = 0.0;
    try {
      x = std::stod(line.substr(0, comma));
      v = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": not a number");
    }
    const std::size_t i = values.size();
    if (i >= grid.size()) throw ConfigError("csv: more samples than grid nodes");
    const double xi = grid.node(i);
    if (std::abs(x - xi) > 1e-12 * std::max(1.0, grid.b())) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": x does not match grid node " +
                        std::to_string(i));
    }
    values.push_back(v);
  }
  if (values.size() != grid.size()) {
    throw ConfigError("csv: expected " + std::to_string(grid.size()) + " samples, got " +
                      std::to_string(values.size()));
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace nsbf

#endif  // NSBF_GRID_HPP
