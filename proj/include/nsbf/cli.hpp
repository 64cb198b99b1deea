#ifndef NSBF_CLI_HPP
#define NSBF_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsbf/config.hpp"
#include "nsbf/decay.hpp"
#include "nsbf/error.hpp"
#include "nsbf/kernel.hpp"
#include "nsbf/oracle.hpp"
#include "nsbf/pipeline.hpp"
#include "nsbf/spectrum.hpp"

namespace nsbf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct Overrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> mesh;
  std::optional<std::string> n;  // integer or "auto"
};

namespace detail {

inline void apply(RunConfig& cfg, const Overrides& o) {
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.mesh) {
    if (*o.mesh < 10 || *o.mesh % 5 != 0) throw ConfigError("--mesh: M must be a positive multiple of 5");
    cfg.mesh = *o.mesh;
  }
  if (o.n) {
    if (*o.n == "auto") {
      cfg.n1 = cfg.n2 = std::nullopt;
    } else {
      std::size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(*o.n, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != o.n->size() || v < 0) throw ConfigError("--n: expected a non-negative integer or auto");
      cfg.n1 = cfg.n2 = v;
    }
  }
}

// CSV sink: a file under the output directory, or the given stream.
class Output {
 public:
  Output(const RunConfig& cfg, const std::string& name, std::ostream& fallback) : os_(&fallback) {
    if (!cfg.out_dir && !cfg.out_file) return;
    std::filesystem::path path = cfg.out_file ? std::filesystem::path(*cfg.out_file) : std::filesystem::path(name + ".csv");
    if (cfg.out_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*cfg.out_dir, ec);
      if (ec) throw ConfigError("output: cannot create directory '" + cfg.out_dir->string() + "'");
      path = *cfg.out_dir / path;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("output: cannot write '" + path.string() + "'");
    os_ = file_.get();
    path_ = path;
  }

  std::ostream& stream() { return *os_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::ostream* os_;
  std::unique_ptr<std::ofstream> file_;
  std::optional<std::filesystem::path> path_;
};

inline std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw NumericalError(what + " is not finite");
}

inline PipelineOptions pipeline_options(const RunConfig& cfg) {
  PipelineOptions opt;
  opt.n_max = cfg.n_max;
  opt.n1 = cfg.n1;
  opt.n2 = cfg.n2;
  return opt;
}

// N*, shift and residuals; shared by every subcommand that builds a pipeline.
inline void summarize(const Pipeline& p, nlohmann::json& summary, std::ostream& err) {
  err << "  N1* = " << p.n1 << (p.n1_auto ? " (auto)" : " (fixed)") << ", beta residual = " << num(p.beta_residual())
      << '\n';
  summary["N1"] = p.n1;
  summary["N1_auto"] = p.n1_auto;
  summary["beta_residual"] = p.beta_residual();
  err << "  N2* = " << p.n2 << (p.n2_auto ? " (auto)" : " (fixed)");
  summary["N2"] = p.n2;
  summary["N2_auto"] = p.n2_auto;
  if (const auto g = p.gamma_residual()) {
    err << ", gamma residual = " << num(*g) << '\n';
    summary["gamma_residual"] = *g;
  } else {
    err << ", gamma residual unavailable (q unbounded at 0)\n";
    summary["gamma_residual"] = nullptr;
  }
  if (p.coefficients.shift != 0.0) err << "  spectral shift = " << num(p.coefficients.shift) << '\n';
  summary["shift"] = p.coefficients.shift;
}

inline Pipeline pipeline_for(const RunConfig& cfg, nlohmann::json& summary, std::ostream& err) {
  const Problem problem = make_problem(cfg);
  err << "  ell = " << num(problem.ell) << ", b = " << num(problem.b) << ", q = " << cfg.potential->label()
      << ", mesh M = " << problem.intervals << '\n';
  summary["ell"] = problem.ell;
  summary["b"] = problem.b;
  summary["potential"] = cfg.potential->label();
  summary["mesh"] = problem.intervals;
  Pipeline p = build_pipeline(problem, pipeline_options(cfg));
  summarize(p, summary, err);
  return p;
}

inline std::vector<double> solve_points(const RunConfig& cfg) {
  std::vector<double> xs = cfg.xs.empty() ? std::vector<double>{cfg.b} : cfg.xs;
  for (double x : xs) {
    if (!(x > 0.0) || x > cfg.b) throw ConfigError("config: 'solve.x' values must lie in (0, b]");
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

inline const std::vector<double>& solve_omegas(const RunConfig& cfg) {
  if (cfg.omegas.empty()) throw ConfigError("config: 'solve.omegas' or 'solve.omega_range' is required");
  return cfg.omegas;
}

inline void run_eigs(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  if (!cfg.omega_max && cfg.count == 0) throw ConfigError("config: 'method.omega_max' or 'method.count' is required");
  const Pipeline p = pipeline_for(cfg, summary, err);
  ScanOptions opt;
  opt.omega_min = cfg.omega_min;
  if (cfg.omega_max) opt.omega_max = *cfg.omega_max;
  opt.count = static_cast<std::size_t>(cfg.count);
  opt.step = cfg.scan_step;
  const Spectrum sp = find_eigenvalues(p.coefficients, cfg.bc, p.n1, p.n2, opt);

  Output o(cfg, "eigs", out);
  auto& os = o.stream();
  os << "n,omega,residual\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
    require_finite(sp.eigenvalues[k], "eigenvalue " + std::to_string(k + 1));
    os << k + 1 << ',' << num(sp.eigenvalues[k]) << ',' << num(sp.residuals[k]) << '\n';
    worst = std::max(worst, sp.residuals[k]);
  }
  err << "  bc = " << cfg.bc.name() << ", scan step = " << num(sp.step) << ", eigenvalues = " << sp.eigenvalues.size()
      << " in [" << num(sp.omega_min) << ", " << num(sp.omega_max) << "], worst relative residual = " << num(worst)
      << '\n';
  for (const auto& w : sp.warnings) err << "  warning: " << w << '\n';
  summary["bc"] = cfg.bc.name();
  summary["eigenvalues"] = sp.eigenvalues.size();
  summary["worst_residual"] = worst;
  summary["warnings"] = sp.warnings;
}

inline void run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  const auto& omegas = solve_omegas(cfg);
  const auto xs = solve_points(cfg);
  const Pipeline p = pipeline_for(cfg, summary, err);
  Output o(cfg, "solve", out);
  auto& os = o.stream();
  os << "x,omega,u,du\n";
  for (double x : xs) {
    const SeriesEvaluator ev = p.evaluator(x);
    if (p.coefficients.grid().find_node(x) == Grid::npos) {
      err << "  note: x = " << num(x) << " is off the mesh; coefficients are interpolated linearly\n";
    }
    for (double w : omegas) {
      const SolutionValue s = ev(w);
      require_finite(s.u, "u_N");
      require_finite(s.du, "u'_N");
      os << num(x) << ',' << num(w) << ',' << num(s.u) << ',' << num(s.du) << '\n';
    }
  }
  summary["points"] = xs.size() * omegas.size();
}

inline void run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  const auto& omegas = solve_omegas(cfg);
  const auto xs = solve_points(cfg);
  const Problem problem = make_problem(cfg);
  err << "  ell = " << num(problem.ell) << ", q = " << cfg.potential->label() << ", tol = " << num(cfg.oracle_tol)
      << '\n';
  std::vector<OracleResult> results;
  double bound = 0.0;
  long steps = 0;
  for (double w : omegas) {
    results.push_back(oracle_solution(problem, w, cfg.oracle_tol, xs));
    bound = std::max(bound, results.back().error_bound);
    steps += results.back().steps;
  }
  Output o(cfg, "oracle", out);
  auto& os = o.stream();
  os << "x,omega,u,du\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (const auto& r : results) {
      require_finite(r.u[i], "oracle u");
      require_finite(r.du[i], "oracle u'");
      os << num(r.x[i]) << ',' << num(r.omega) << ',' << num(r.u[i]) << ',' << num(r.du[i]) << '\n';
    }
  }
  err << "  steps = " << steps << ", largest local error estimate = " << num(bound) << '\n';
  summary["steps"] = steps;
  summary["error_bound"] = bound;
}

inline void run_coeffs(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  const Pipeline p = pipeline_for(cfg, summary, err);
  const CoefficientSet& cs = p.coefficients;
  Output o(cfg, "coeffs", out);
  auto& os = o.stream();
  os << "n,beta_b,gamma_b,beta_residual,gamma_residual\n";
  for (int n = 0; n <= cs.beta_order(); ++n) {
    const auto k = static_cast<std::size_t>(n);
    os << n << ',' << num(cs.beta[k].back()) << ',';
    if (n <= cs.gamma_order()) os << num(cs.gamma[k].back());
    os << ',' << num(cs.beta_residuals[k]) << ',';
    if (k < cs.gamma_residuals.size()) os << num(cs.gamma_residuals[k]);
    os << '\n';
  }
}

inline void run_kernel(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  const Pipeline p = pipeline_for(cfg, summary, err);
  const Grid& grid = p.coefficients.grid();
  const double want = cfg.kernel_x.value_or(cfg.b);
  if (!(want > 0.0) || want > cfg.b) throw ConfigError("config: 'kernel.x' must lie in (0, b]");
  const auto node = std::clamp<long>(std::lround(want / grid.step()), 1, grid.intervals());
  const double x = grid.node(static_cast<std::size_t>(node));
  const auto t = kernel_points(cfg.kernel_kind, x, cfg.kernel_t_count);
  KernelSlice slice;
  switch (cfg.kernel_kind) {
    case KernelKind::K:
      slice = kernel_K(p.coefficients, x, t, p.n1);
      break;
    case KernelKind::K1:
      slice = kernel_K1(p.coefficients, x, t, p.n2);
      break;
    case KernelKind::R:
      slice = kernel_R(p.coefficients, x, t, p.n1);
      break;
  }
  Output o(cfg, "kernel", out);
  auto& os = o.stream();
  os << "t,value\n";
  for (std::size_t k = 0; k < slice.t.size(); ++k) {
    require_finite(slice.values[k], "kernel value");
    os << num(slice.t[k]) << ',' << num(slice.values[k]) << '\n';
  }
  err << "  kernel " << to_string(slice.kind) << " at x = " << num(x) << " (mesh node " << node << "), N = " << slice.n
      << '\n';
  summary["kernel"] = to_string(slice.kind);
  summary["x"] = x;
}

inline void run_decay(const RunConfig& cfg, std::ostream& out, std::ostream& err, nlohmann::json& summary) {
  std::vector<PotentialSpec> potentials = cfg.decay_potentials;
  if (potentials.empty()) {
    if (!cfg.potential) throw ConfigError("config: 'decay.potentials' or 'problem.potential' is required");
    potentials.push_back(*cfg.potential);
  }
  const std::vector<double> ells = cfg.decay_ells.empty() ? std::vector<double>{cfg.ell} : cfg.decay_ells;
  Output o(cfg, "decay", out);
  auto& os = o.stream();
  os << "potential,ell,alpha,k_first,k_last,status\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& spec : potentials) {
    for (double ell : ells) {
      const Problem problem = make_problem(cfg, spec, ell);
      const auto mags = beta_magnitudes_at_b(problem, cfg.decay_count);
      DecayFit fit;
      try {
        fit = fit_decay_slope(mags);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (potential " + spec.label() + ", ell = " + num(ell) + ")");
      }
      os << spec.label() << ',' << num(ell) << ',';
      if (fit.ok) {
        os << num(-fit.slope) << ',' << fit.first << ',' << fit.last << ",ok\n";
        err << "  " << spec.label() << ", ell = " << num(ell) << ": alpha = " << num(-fit.slope) << " over k = "
            << fit.first << ".." << fit.last << '\n';
      } else {
        os << ",,,no-fit\n";
        err << "  " << spec.label() << ", ell = " << num(ell) << ": no linear region\n";
      }
      rows.push_back({{"potential", spec.label()}, {"ell", ell}, {"ok", fit.ok}, {"alpha", fit.ok ? -fit.slope : 0.0}});
    }
  }
  summary["fits"] = rows;
}

}  // namespace detail

/// nsbf <eigs|solve|coeffs|kernel|decay|oracle> <config.json> [--out DIR] [--mesh M] [--n N|auto]
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Perturbed Bessel equation solver based on Neumann series of Bessel functions", "nsbf"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config_path;
  std::string out_dir;
  int mesh = 0;
  std::string n;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"eigs", "eigenvalues of the boundary value problem"},
      {"solve", "u_N and u'_N at given x and omega"},
      {"coeffs", "beta_n(b), gamma_n(b) and the verification residuals"},
      {"kernel", "a slice of K, K1 or R at fixed x"},
      {"decay", "power-law decay rate of |beta_k(b)|"},
      {"oracle", "reference values by direct integration (same columns as solve)"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "write CSV and summary.json into DIR");
    sub->add_option("--mesh", mesh, "number of mesh intervals M (multiple of 5)");
    sub->add_option("--n", n, "truncation order for beta and gamma, or auto");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (app.get_subcommands().front()->count("--mesh")) ov.mesh = mesh;
  if (!n.empty()) ov.n = n;

  nlohmann::json summary{{"command", command}};
  const auto start = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = load_config(config_path);
    detail::apply(cfg, ov);
    err << "nsbf " << command << ": " << config_path << '\n';
    if (command == "eigs") detail::run_eigs(cfg, out, err, summary);
    if (command == "solve") detail::run_solve(cfg, out, err, summary);
    if (command == "coeffs") detail::run_coeffs(cfg, out, err, summary);
    if (command == "kernel") detail::run_kernel(cfg, out, err, summary);
    if (command == "decay") detail::run_decay(cfg, out, err, summary);
    if (command == "oracle") detail::run_oracle(cfg, out, err, summary);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "  time = " << std::fixed << std::setprecision(3) << seconds << " s\n" << std::defaultfloat;
    if (cfg.out_dir) {
      std::ofstream js(*cfg.out_dir / "summary.json", std::ios::binary);
      js << summary.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "nsbf: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "nsbf: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "nsbf: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace nsbf::cli

#endif  // NSBF_CLI_HPP
