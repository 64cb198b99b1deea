#ifndef NSBF_CONFIG_HPP
#define NSBF_CONFIG_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nsbf/error.hpp"
#include "nsbf/grid.hpp"
#include "nsbf/kernel.hpp"
#include "nsbf/problem.hpp"

namespace nsbf {

inline constexpr int kConfigVersion = 1;

/// A potential as written in a config file, kept so it can be echoed back.
struct PotentialSpec {
  std::string name = "zero";
  double c = 1.0;
  double p = 1.0;
  int m = 0;
  std::filesystem::path path;

  std::string label() const {
    std::ostringstream os;
    os << name;
    if (name == "power") os << "[c=" << c << ";p=" << p << "]";
    if (name == "qm") os << "[m=" << m << "]";
    if (name == "file") os << "[" << path.filename().string() << "]";
    return os.str();
  }
};

/// "auto" is an empty optional.
using Order = std::optional<int>;

struct RunConfig {
  // problem
  double ell = 0.0;
  double b = std::numbers::pi;
  std::optional<PotentialSpec> potential;
  int mesh = Grid::kDefaultIntervals;
  double mu = 0.0;
  // method
  Order n1;
  Order n2;
  int n_max = 40;
  double omega_min = 1e-3;
  std::optional<double> omega_max;
  int count = 0;
  double scan_step = 0.0;
  // boundary condition
  BoundaryCondition bc = BoundaryCondition::dirichlet();
  // solve / oracle
  std::vector<double> xs;  // empty: b
  std::vector<double> omegas;
  double oracle_tol = 1e-12;
  // kernel
  KernelKind kernel_kind = KernelKind::K;
  std::optional<double> kernel_x;
  int kernel_t_count = 101;
  // decay
  std::vector<PotentialSpec> decay_potentials;
  std::vector<double> decay_ells;
  int decay_count = 100;
  // output
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> out_file;
};

namespace detail {

// Walks one JSON object, remembering which keys were read so the rest can be
// reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + where() + "' must be an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const nlohmann::json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("config: '" + field(key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("config: '" + field(key) + "' must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  int integer(const std::string& key, int fallback, int min_value = 0) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("config: '" + field(key) + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 1000000000LL) {
      throw ConfigError("config: '" + field(key) + "' must be an integer >= " + std::to_string(min_value));
    }
    return static_cast<int>(x);
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("config: '" + field(key) + "' must be a string");
    return v.get<std::string>();
  }

  Order order(const std::string& key, Order fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    if (v.is_number_integer() && v.get<long long>() >= 0 && v.get<long long>() <= 100000) {
      return static_cast<int>(v.get<long long>());
    }
    throw ConfigError("config: '" + field(key) + "' must be a non-negative integer or \"auto\"");
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (v.is_number()) return {number(key, 0.0)};
    if (!v.is_array()) throw ConfigError("config: '" + field(key) + "' must be a number or an array of numbers");
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw ConfigError("config: '" + field(key) + "' must contain finite numbers only");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("config: unknown key '" + field(key) + "'");
    }
  }

  const std::string& path() const noexcept { return path_; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline PotentialSpec parse_potential(const nlohmann::json& j, const std::string& path,
                                     const std::filesystem::path& base) {
  PotentialSpec spec;
  if (j.is_string()) {  // bare name
    spec.name = j.get<std::string>();
    if (spec.name != "zero" && spec.name != "ex1") {
      throw ConfigError("config: '" + path + "' = \"" + spec.name + "\" needs parameters; use an object");
    }
    return spec;
  }
  ObjectReader r(j, path);
  spec.name = r.string("name", "");
  if (spec.name == "power") {
    spec.c = r.number("c", 1.0);
    spec.p = r.number("p", 1.0);
  } else if (spec.name == "qm") {
    spec.m = r.integer("m", 0);
  } else if (spec.name == "file") {
    const std::string file = r.string("path", "");
    if (file.empty()) throw ConfigError("config: '" + r.field("path") + "' is required for a file potential");
    spec.path = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base / file;
  } else if (spec.name != "zero" && spec.name != "ex1") {
    throw ConfigError("config: '" + r.field("name") + "' must be one of zero, power, ex1, qm, file (got \"" +
                      spec.name + "\")");
  }
  r.finish();
  return spec;
}

inline std::vector<double> parse_omegas(ObjectReader& r) {
  std::vector<double> omegas = r.numbers("omegas");
  if (r.has("omega_range")) {
    ObjectReader range(r.at("omega_range"), r.field("omega_range"));
    const double from = range.number("from", 1.0);
    const double to = range.number("to", from);
    const int count = range.integer("count", 1, 1);
    range.finish();
    if (count > 1 && !(to > from)) throw ConfigError("config: '" + range.field("to") + "' must exceed 'from'");
    for (int k = 0; k < count; ++k) omegas.push_back(count == 1 ? from : from + (to - from) * k / (count - 1));
  }
  for (double w : omegas) {
    if (!(w >= 0.0)) throw ConfigError("config: '" + r.field("omegas") + "' must be non-negative");
  }
  return omegas;
}

}  // namespace detail

/// Parses a version-1 config. Relative file paths resolve against base.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  detail::ObjectReader root(j, "");
  if (!root.has("version")) throw ConfigError("config: 'version' is required");
  if (!root.at("version").is_number_integer() || root.at("version").get<long long>() != kConfigVersion) {
    throw ConfigError("config: 'version' must be " + std::to_string(kConfigVersion));
  }
  RunConfig cfg;

  if (!root.has("problem")) throw ConfigError("config: 'problem' block is required");
  {
    detail::ObjectReader r(root.at("problem"), "problem");
    cfg.ell = r.number("ell", 0.0);
    cfg.b = r.number("b", std::numbers::pi);
    if (r.has("potential")) cfg.potential = detail::parse_potential(r.at("potential"), "problem.potential", base);
    cfg.mesh = r.integer("mesh", Grid::kDefaultIntervals, 10);
    if (cfg.mesh % 5 != 0) throw ConfigError("config: 'problem.mesh' must be a multiple of 5");
    cfg.mu = r.number("mu", 0.0);
    r.finish();
  }
  if (root.has("method")) {
    detail::ObjectReader r(root.at("method"), "method");
    if (r.has("N")) cfg.n1 = cfg.n2 = r.order("N", std::nullopt);
    cfg.n1 = r.order("N1", cfg.n1);
    cfg.n2 = r.order("N2", cfg.n2);
    cfg.n_max = r.integer("n_max", 40);
    cfg.omega_min = r.number("omega_min", 1e-3);
    cfg.omega_max = r.optional_number("omega_max");
    cfg.count = r.integer("count", 0);
    cfg.scan_step = r.number("scan_step", 0.0);
    if (cfg.scan_step < 0.0) throw ConfigError("config: 'method.scan_step' must be non-negative");
    if (!(cfg.omega_min > 0.0)) throw ConfigError("config: 'method.omega_min' must be positive");
    r.finish();
  }
  if (root.has("bc")) {
    detail::ObjectReader r(root.at("bc"), "bc");
    const std::string kind = r.string("kind", "dirichlet");
    if (kind == "dirichlet") {
      cfg.bc = BoundaryCondition::dirichlet();
    } else if (kind == "neumann") {
      cfg.bc = BoundaryCondition::neumann();
    } else if (kind == "robin") {
      cfg.bc = BoundaryCondition::robin(r.number("a", 0.0), r.number("c", 1.0));
    } else {
      throw ConfigError("config: 'bc.kind' must be dirichlet, neumann or robin (got \"" + kind + "\")");
    }
    r.finish();
  }
  if (root.has("solve")) {
    detail::ObjectReader r(root.at("solve"), "solve");
    cfg.xs = r.numbers("x");
    cfg.omegas = detail::parse_omegas(r);
    r.finish();
  }
  if (root.has("oracle")) {
    detail::ObjectReader r(root.at("oracle"), "oracle");
    cfg.oracle_tol = r.number("tol", 1e-12);
    if (!(cfg.oracle_tol >= 1e-13)) throw ConfigError("config: 'oracle.tol' must be at least 1e-13");
    r.finish();
  }
  if (root.has("kernel")) {
    detail::ObjectReader r(root.at("kernel"), "kernel");
    const std::string kind = r.string("kind", "K");
    if (kind == "K") {
      cfg.kernel_kind = KernelKind::K;
    } else if (kind == "K1") {
      cfg.kernel_kind = KernelKind::K1;
    } else if (kind == "R") {
      cfg.kernel_kind = KernelKind::R;
    } else {
      throw ConfigError("config: 'kernel.kind' must be K, K1 or R (got \"" + kind + "\")");
    }
    cfg.kernel_x = r.optional_number("x");
    cfg.kernel_t_count = r.integer("t_count", 101, 2);
    r.finish();
  }
  if (root.has("decay")) {
    detail::ObjectReader r(root.at("decay"), "decay");
    if (r.has("potentials")) {
      const auto& list = r.at("potentials");
      if (!list.is_array() || list.empty()) throw ConfigError("config: 'decay.potentials' must be a non-empty array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        cfg.decay_potentials.push_back(
            detail::parse_potential(list[i], "decay.potentials[" + std::to_string(i) + "]", base));
      }
    }
    cfg.decay_ells = r.numbers("ell");
    cfg.decay_count = r.integer("count", 100, 1);
    r.finish();
  }
  if (root.has("output")) {
    detail::ObjectReader r(root.at("output"), "output");
    if (r.has("dir")) cfg.out_dir = base / r.string("dir", ".");
    if (r.has("file")) cfg.out_file = r.string("file", "");
    const std::string format = r.string("format", "csv");
    if (format != "csv") throw ConfigError("config: 'output.format' must be \"csv\"");
    r.finish();
  }
  root.finish();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open '" + file.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: '" + file.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, file.parent_path());
}

inline Potential make_potential(const PotentialSpec& spec, const Grid& grid) {
  if (spec.name == "zero") return Potential::zero();
  if (spec.name == "ex1") return Potential::ex1();
  if (spec.name == "power") return Potential::power(spec.c, spec.p);
  if (spec.name == "qm") return Potential::qm(spec.m);
  if (spec.name == "file") {
    std::ifstream in(spec.path);
    if (!in) throw ConfigError("potential file: cannot open '" + spec.path.string() + "'");
    return Potential::sampled(read_csv(in, grid));
  }
  throw ConfigError("potential: unknown name \"" + spec.name + "\"");
}

inline Problem make_problem(const RunConfig& cfg, const PotentialSpec& spec, double ell) {
  Problem p;
  p.ell = ell;
  p.b = cfg.b;
  p.mu = cfg.mu;
  p.intervals = cfg.mesh;
  p.validate();
  p.q = make_potential(spec, p.grid());
  p.validate();
  return p;
}

inline Problem make_problem(const RunConfig& cfg) {
  if (!cfg.potential) throw ConfigError("config: 'problem.potential' is required");
  return make_problem(cfg, *cfg.potential, cfg.ell);
}

}  // namespace nsbf

#endif  // NSBF_CONFIG_HPP
