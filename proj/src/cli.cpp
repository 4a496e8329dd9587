#include "glpd/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "glpd/conjugates.hpp"
#include "glpd/solve.hpp"
#include "glpd/theorem.hpp"

namespace glpd::cli {

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    sink_[name_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::map<std::string, double>& sink_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

struct Solved {
  Params params;
  CriticalPoint cp;
};

// Shared front half of solve/verify/sweep/scan: build the problem, run
// Newton and record the critical point in the outcome.
Solved solve_into(Outcome& out, const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Params p = make_params(config, base_dir);
  const ScalarField init = make_profile(config.init, p.grid(), base_dir, "init");
  CriticalPoint cp = [&] {
    Stopwatch w(out.report.timing, "solve");
    return newton_primal(p, init, config.tol, config.max_iter);
  }();
  out.report.critical_point = summarize(p, cp);
  if (cp.u0.all_finite()) {
    out.report.field_counts = p.grid().counts();
    out.report.field.assign(cp.u0.values().data(), cp.u0.values().data() + cp.u0.size());
    out.files["u0.field"] = field_to_string(cp.u0);
  }
  if (!cp.converged) {
    out.report.exit_status = kNotConverged;
    out.report.status = "not converged: " + cp.diagnostic;
  }
  return {std::move(p), std::move(cp)};
}

void require_dense_size(const Params& p) {
  if (p.grid().size() > kMaxDenseDimension) {
    throw ConfigError("grid.interior_counts", "at most " + std::to_string(kMaxDenseDimension) +
                                                  " nodes are supported for spectral checks");
  }
}

Outcome start(const std::string& command, const ExperimentConfig& config) {
  Outcome out;
  out.report.command = command;
  out.report.config = config;
  out.report.exit_status = kVerified;
  out.report.status = "ok";
  return out;
}

}  // namespace

std::vector<double> conjugate_arguments() {
  std::vector<double> s;
  for (int k = -24; k <= 25; ++k) s.push_back(0.4 * k);
  return s;
}

Outcome cmd_solve(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Outcome out = start("solve", config);
  const Solved solved = solve_into(out, config, base_dir);
  if (solved.cp.converged) out.report.status = "converged";
  return out;
}

Outcome cmd_verify(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Outcome out = start("verify", config);
  require_dense_size(make_params(config, base_dir));
  const Solved solved = solve_into(out, config, base_dir);
  if (!solved.cp.converged) return out;

  TheoremTolerances tol;
  tol.primal_grad = config.verify_primal_tol;
  tol.seed = config.seed;
  {
    Stopwatch w(out.report.timing, "verify");
    out.report.theorem = verify_theorem(solved.params, solved.cp, tol);
  }
  const TheoremReport& t = *out.report.theorem;
  if (!config.eps_list.empty()) {
    Stopwatch w(out.report.timing, "sweep");
    out.report.sweep = epsilon_sweep(solved.params, solved.cp, config.eps_list);
    out.files["sweep.csv"] = sweep_to_csv(*out.report.sweep);
  }

  if (config.scan) {
    Stopwatch w(out.report.timing, "scan");
    out.report.scan = concavity_radius(solved.params, solved.cp, config.scan->n_directions, config.scan->t_max,
                                       config.seed);
  }

  if (!t.hypothesis_satisfied) {
    out.report.exit_status = kNotApplicable;
    out.report.status = "not applicable: primal Hessian is not positive definite at the critical point";
  } else if (t.passed) {
    out.report.status = "passed";
  } else {
    out.report.exit_status = kFailed;
    out.report.status = "failed";
  }
  return out;
}

Outcome cmd_conjugate_check(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Outcome out = start("conjugate-check", config);
  const Params p = make_params(config, base_dir);
  Stopwatch w(out.report.timing, "conjugates");
  for (const ConjugatePair& pair : conjugate_pairs(p)) {
    for (double s : conjugate_arguments()) {
      ConjugateRow row;
      row.term = pair.name;
      row.coefficient = pair.coefficient;
      row.s = s;
      row.closed_form = pair.conjugate(s);
      row.oracle = scalar_conjugate_oracle_auto(pair.integrand, s, kConjugateOracleStep);
      row.abs_error = std::abs(row.closed_form - row.oracle);
      out.report.conjugate_max_error = std::max(out.report.conjugate_max_error, row.abs_error);
      out.report.conjugates.push_back(row);
    }
  }
  out.files["conjugates.csv"] = conjugates_to_csv(out.report.conjugates);
  return out;
}

Outcome cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Outcome out = start("sweep", config);
  if (config.eps_list.empty()) throw ConfigError("sweep.eps_list", "required for the sweep command");
  require_dense_size(make_params(config, base_dir));
  const Solved solved = solve_into(out, config, base_dir);
  if (!solved.cp.converged) return out;
  {
    Stopwatch w(out.report.timing, "sweep");
    out.report.sweep = epsilon_sweep(solved.params, solved.cp, config.eps_list);
  }
  out.files["sweep.csv"] = sweep_to_csv(*out.report.sweep);
  return out;
}

Outcome cmd_scan(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Outcome out = start("scan", config);
  require_dense_size(make_params(config, base_dir));
  const Solved solved = solve_into(out, config, base_dir);
  if (!solved.cp.converged) return out;
  const ScanSpec spec = config.scan.value_or(ScanSpec{});
  Stopwatch w(out.report.timing, "scan");
  out.report.scan = concavity_radius(solved.params, solved.cp, spec.n_directions, spec.t_max, config.seed);
  return out;
}

void write_outputs(const Outcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!(f << text)) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  write("report.json", dump_json(report_to_json(outcome.report)));
  for (const auto& [name, text] : outcome.files) write(name, text);
}

int run(int argc, char** argv) {
  CLI::App app{"Primal-dual Ginzburg-Landau verification lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "glpd-out";
  std::optional<std::uint64_t> seed;
  std::vector<double> eps;
  bool quiet = false;

  using Command = Outcome (*)(const ExperimentConfig&, const std::filesystem::path&);
  const std::vector<std::pair<std::string, Command>> commands{
      {"solve", cmd_solve}, {"verify", cmd_verify}, {"conjugate-check", cmd_conjugate_check},
      {"sweep", cmd_sweep}, {"scan", cmd_scan}};
  const std::map<std::string, std::string> help{
      {"solve", "Newton solve for a critical point"},
      {"verify", "solve, then check every clause of the local duality statement"},
      {"conjugate-check", "closed-form conjugates against a brute-force sup"},
      {"sweep", "duality gap and dual spectrum across eps values"},
      {"scan", "concavity and convexity radii along random directions"}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides solver.seed");
    sub->add_option("--eps", eps, "comma-separated eps list; overrides sweep.eps_list")->delimiter(',');
    sub->add_flag("--quiet", quiet, "no summary on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Command fn = nullptr;
  for (const auto& [name, f] : commands) {
    if (name == command) fn = f;
  }

  Outcome outcome;
  try {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (!eps.empty()) {
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(std::isfinite(eps[i]) && eps[i] > 0.0)) {
          throw ConfigError("--eps[" + std::to_string(i) + "]", "must be > 0");
        }
      }
      config.eps_list = eps;
    }
    const auto start = std::chrono::steady_clock::now();
    outcome = fn(config, std::filesystem::path(config_path).parent_path());
    outcome.report.timing["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    write_outputs(outcome, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }

  if (!quiet) {
    std::ostringstream line;
    line << command << ": " << outcome.report.status << " (exit " << outcome.report.exit_status << ")";
    if (outcome.report.critical_point) {
      line << "  iterations=" << outcome.report.critical_point->iterations
           << " residual=" << format_double(outcome.report.critical_point->primal_grad_norm)
           << " J=" << format_double(outcome.report.critical_point->energy);
    }
    if (!outcome.report.conjugates.empty()) line << "  max_abs_error=" << format_double(outcome.report.conjugate_max_error);
    std::cout << line.str() << "\n";
  }
  return outcome.report.exit_status;
}

}  // namespace glpd::cli
