#include "glpd/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace glpd {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TheoremTolerances, primal_grad, gap_rel, hessian_identity_rel, spectral_map_rel,
                                   sweep_rel, sweep_eps, perturbations, perturbation_norm, perturbation_slack, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SweepRow, epsilon, K, gap, dual_grad_norm, min_eig_dual, max_eig_dual,
                                   predicted_min_eig)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EpsilonSweep, rows, max_eig_primal, gap_rel, ratio_rel, gaps_ok,
                                   ratios_applicable, ratios_ok, max_ratio_deviation, max_tracking_deviation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TheoremReport, epsilon, primal_value, dual_value, primal_grad_norm, primal_grad_ok,
                                   min_eig_primal_hessian, max_eig_primal_hessian, hypothesis_satisfied,
                                   epsilon_small, dual_grad_norm, dual_grad_tolerance, dual_grad_ok, duality_gap,
                                   gap_tolerance, gap_ok, hessian_identity_residual, hessian_identity_tolerance,
                                   hessian_identity_ok, spectral_map_residual, spectral_map_tolerance, spectral_map_ok,
                                   min_eig_dual_hessian, max_eig_dual_hessian, dual_concave, epsilon_scaling, sweep,
                                   scaling_ok, perturbation_count, primal_violations, dual_violations,
                                   perturbation_ok, tolerances, passed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConcavityScan, directions, t_max, t_per_direction, primal_convexity_t,
                                   min_dual_radius, min_primal_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CriticalPointSummary, converged, iterations, primal_grad_norm, tolerance, energy,
                                   residual_history, diagnostic)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConjugateRow, term, coefficient, s, closed_form, oracle, abs_error)

namespace {

constexpr const char* kFieldMagic = "glpd-field";
constexpr const char* kFieldVersion = "v1";

std::string field_header(const GridSpec& g) {
  std::string h = std::string(kFieldMagic) + " " + kFieldVersion + " d=" + std::to_string(g.dimension()) + " n=";
  for (int a = 0; a < g.dimension(); ++a) {
    if (a > 0) h += ",";
    h += std::to_string(g.count(a));
  }
  return h;
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw FormatError("field file: bad " + what + " '" + s + "'");
  }
  if (used != s.size()) throw FormatError("field file: bad " + what + " '" + s + "'");
  return v;
}

// Reads one table of the config, remembering which keys were consumed so
// that typos surface as errors instead of silently falling back to defaults.
class TableReader {
 public:
  TableReader(const json& root, const std::string& name) : path_(name) {
    if (!root.contains(name)) {
      table_ = &empty_;
      return;
    }
    table_ = &root.at(name);
    if (!table_->is_object()) throw ConfigError(name, "expected a table");
  }

  bool has(const std::string& key) const { return table_->contains(key); }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return table_->at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : table_->items()) {
      if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
    }
  }

 private:
  inline static const json empty_ = json::object();
  const json* table_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* kind_name(ProfileSpec::Kind k) {
  switch (k) {
    case ProfileSpec::Kind::zero: return "zero";
    case ProfileSpec::Kind::constant: return "constant";
    case ProfileSpec::Kind::bump: return "bump";
    case ProfileSpec::Kind::file: return "file";
  }
  return "zero";
}

json profile_to_json(const ProfileSpec& p) {
  json j{{"kind", kind_name(p.kind)}};
  if (p.kind == ProfileSpec::Kind::constant || p.kind == ProfileSpec::Kind::bump) j["value"] = p.value;
  if (p.kind == ProfileSpec::Kind::file) j["path"] = p.path;
  return j;
}

ProfileSpec profile_from_json(const json& root, const std::string& name, ProfileSpec fallback) {
  if (!root.contains(name)) return fallback;
  TableReader t(root, name);
  ProfileSpec p;
  const std::string kind = t.text("kind", kind_name(fallback.kind));
  if (kind == "zero") {
    p.kind = ProfileSpec::Kind::zero;
    p.value = 0.0;
  } else if (kind == "constant") {
    p.kind = ProfileSpec::Kind::constant;
    if (!t.has("value")) throw ConfigError(t.path("value"), "required for a constant profile");
    p.value = t.number("value", 0.0);
  } else if (kind == "bump") {
    p.kind = ProfileSpec::Kind::bump;
    p.value = t.number("value", 1.0);
  } else if (kind == "file") {
    p.kind = ProfileSpec::Kind::file;
    p.path = t.text("path", "");
    if (p.path.empty()) throw ConfigError(t.path("path"), "required for a file profile");
  } else {
    throw ConfigError(t.path("kind"), "expected zero, constant, bump or file, got '" + kind + "'");
  }
  if (!std::isfinite(p.value)) throw ConfigError(t.path("value"), "must be finite");
  t.finish();
  return p;
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(std::ostream& out, const ScalarField& u) {
  out << field_header(u.grid()) << '\n';
  for (Eigen::Index i = 0; i < u.size(); ++i) out << format_double(u[i]) << '\n';
}

ScalarField read_field(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("field file: missing header");
  std::istringstream hs(header);
  std::string magic, version, dim_tok, n_tok, extra;
  hs >> magic >> version >> dim_tok >> n_tok;
  if (magic != kFieldMagic) throw FormatError("field file: expected '" + std::string(kFieldMagic) + "' header");
  if (version != kFieldVersion) throw FormatError("field file: unsupported version '" + version + "'");
  if (dim_tok.rfind("d=", 0) != 0 || n_tok.rfind("n=", 0) != 0 || (hs >> extra)) {
    throw FormatError("field file: malformed header '" + header + "'");
  }
  const int dim = parse_int(dim_tok.substr(2), "dimension");
  std::vector<int> counts;
  std::istringstream ns(n_tok.substr(2));
  for (std::string part; std::getline(ns, part, ',');) counts.push_back(parse_int(part, "count"));
  if (static_cast<int>(counts.size()) != dim) throw FormatError("field file: d does not match the count list");

  GridSpec grid = [&] {
    try {
      return GridSpec(counts);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("field file: ") + e.what());
    }
  }();

  Eigen::VectorXd values(grid.size());
  Eigen::Index read = 0;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (read == grid.size()) throw FormatError("field file: more values than nodes");
    const char* begin = line.c_str() + first;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || line.find_first_not_of(" \t\r", static_cast<std::size_t>(end - line.c_str())) !=
                            std::string::npos) {
      throw FormatError("field file: bad value '" + line + "'");
    }
    values[read++] = v;
  }
  if (read != grid.size()) {
    throw FormatError("field file: expected " + std::to_string(grid.size()) + " values, got " + std::to_string(read));
  }
  try {
    return ScalarField(grid, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("field file: ") + e.what());
  }
}

void save_field(const std::filesystem::path& path, const ScalarField& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_field(out, u);
}

ScalarField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open field file " + path.string());
  return read_field(in);
}

std::string field_to_string(const ScalarField& u) {
  std::ostringstream out;
  write_field(out, u);
  return out.str();
}

// ---------------------------------------------------------------------------

json config_to_json(const ExperimentConfig& c) {
  json params{{"gamma", c.gamma}, {"alpha", c.alpha}, {"beta", c.beta}, {"epsilon", c.epsilon}};
  if (c.K) params["K"] = *c.K;
  json j{
      {"grid", {{"dimension", c.interior_counts.size()}, {"interior_counts", c.interior_counts}}},
      {"params", params},
      {"source", profile_to_json(c.source)},
      {"init", profile_to_json(c.init)},
      {"solver", {{"tol", c.tol}, {"max_iter", c.max_iter}, {"seed", c.seed}, {"n_starts", c.n_starts}}},
      {"verify", {{"primal_tol", c.verify_primal_tol}}},
  };
  if (!c.eps_list.empty()) j["sweep"] = {{"eps_list", c.eps_list}};
  if (c.scan) j["scan"] = {{"n_directions", c.scan->n_directions}, {"t_max", c.scan->t_max}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a table of tables");
  static const std::set<std::string> tables{"grid", "params", "source", "init", "solver", "verify", "sweep", "scan"};
  for (const auto& item : j.items()) {
    if (!tables.count(item.key())) throw ConfigError(item.key(), "unknown table");
  }

  ExperimentConfig c;

  TableReader grid(j, "grid");
  require(grid.has("interior_counts"), grid.path("interior_counts"), "required");
  const json& counts = grid.raw("interior_counts");
  require(counts.is_array() && !counts.empty() && counts.size() <= 3, grid.path("interior_counts"),
          "expected a list of 1 to 3 integers");
  c.interior_counts.clear();
  for (std::size_t a = 0; a < counts.size(); ++a) {
    const std::string path = grid.path("interior_counts") + "[" + std::to_string(a) + "]";
    require(counts[a].is_number_integer(), path, "expected an integer");
    const auto n = counts[a].get<std::int64_t>();
    require(n >= 1 && n <= 1'000'000, path, "must be >= 1");
    c.interior_counts.push_back(static_cast<int>(n));
  }
  const auto dim = grid.integer("dimension", static_cast<std::int64_t>(counts.size()));
  require(dim == static_cast<std::int64_t>(counts.size()), grid.path("dimension"),
          "does not match the length of interior_counts");
  grid.finish();

  TableReader params(j, "params");
  c.gamma = params.number("gamma", c.gamma);
  c.alpha = params.number("alpha", c.alpha);
  c.beta = params.number("beta", c.beta);
  c.epsilon = params.number("epsilon", c.epsilon);
  if (params.has("K")) c.K = params.number("K", 0.0);
  for (auto [name, value] : {std::pair{"gamma", c.gamma}, std::pair{"alpha", c.alpha}, std::pair{"beta", c.beta},
                             std::pair{"epsilon", c.epsilon}}) {
    require(std::isfinite(value) && value > 0.0, params.path(name), "must be a finite value > 0");
  }
  if (c.K) {
    require(std::isfinite(*c.K) && *c.K > c.beta + c.epsilon, params.path("K"), "must exceed beta + epsilon");
  }
  params.finish();

  c.source = profile_from_json(j, "source", c.source);
  c.init = profile_from_json(j, "init", c.init);

  TableReader solver(j, "solver");
  c.tol = solver.number("tol", c.tol);
  require(std::isfinite(c.tol) && c.tol > 0.0, solver.path("tol"), "must be > 0");
  const auto max_iter = solver.integer("max_iter", c.max_iter);
  require(max_iter >= 1 && max_iter <= 1'000'000, solver.path("max_iter"), "must be >= 1");
  c.max_iter = static_cast<int>(max_iter);
  if (solver.has("seed")) {
    const json& s = solver.raw("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0), solver.path("seed"),
            "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  const auto n_starts = solver.integer("n_starts", c.n_starts);
  require(n_starts >= 0 && n_starts <= 1'000'000, solver.path("n_starts"), "must be >= 0");
  c.n_starts = static_cast<int>(n_starts);
  solver.finish();

  TableReader verify(j, "verify");
  c.verify_primal_tol = verify.number("primal_tol", c.verify_primal_tol);
  require(std::isfinite(c.verify_primal_tol) && c.verify_primal_tol > 0.0, verify.path("primal_tol"),
          "must be > 0");
  verify.finish();

  TableReader sweep(j, "sweep");
  if (sweep.has("eps_list")) {
    const json& list = sweep.raw("eps_list");
    require(list.is_array(), sweep.path("eps_list"), "expected a list of numbers");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = sweep.path("eps_list") + "[" + std::to_string(i) + "]";
      require(list[i].is_number(), path, "expected a number");
      const double e = list[i].get<double>();
      require(std::isfinite(e) && e > 0.0, path, "must be > 0");
      c.eps_list.push_back(e);
    }
  }
  sweep.finish();

  if (j.contains("scan")) {
    TableReader scan(j, "scan");
    ScanSpec s;
    const auto n_dir = scan.integer("n_directions", s.n_directions);
    require(n_dir >= 1 && n_dir <= 100'000, scan.path("n_directions"), "must be >= 1");
    s.n_directions = static_cast<int>(n_dir);
    s.t_max = scan.number("t_max", s.t_max);
    require(std::isfinite(s.t_max) && s.t_max >= 0.0, scan.path("t_max"), "must be >= 0");
    scan.finish();
    c.scan = s;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

GridSpec make_grid(const ExperimentConfig& c) {
  try {
    return GridSpec(c.interior_counts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid.interior_counts", e.what());
  }
}

ScalarField make_profile(const ProfileSpec& spec, const GridSpec& grid, const std::filesystem::path& base_dir,
                         const std::string& config_path) {
  switch (spec.kind) {
    case ProfileSpec::Kind::zero:
      return ScalarField(grid);
    case ProfileSpec::Kind::constant:
      return ScalarField(grid, Eigen::VectorXd::Constant(grid.size(), spec.value));
    case ProfileSpec::Kind::bump:
      return spec.value * sine_bump(grid);
    case ProfileSpec::Kind::file: {
      const std::filesystem::path p = std::filesystem::path(spec.path).is_absolute() ? std::filesystem::path(spec.path)
                                                                                    : base_dir / spec.path;
      ScalarField u = [&] {
        try {
          return load_field(p);
        } catch (const FormatError& e) {
          throw ConfigError(config_path + ".path", e.what());
        }
      }();
      if (u.grid() != grid) throw ConfigError(config_path + ".path", "field grid does not match the config grid");
      return u;
    }
  }
  return ScalarField(grid);
}

Params make_params(const ExperimentConfig& c, const std::filesystem::path& base_dir) {
  const GridSpec grid = make_grid(c);
  ScalarField f = make_profile(c.source, grid, base_dir, "source");
  try {
    return Params::make(c.gamma, c.alpha, c.beta, c.epsilon, c.K, std::move(f));
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
  }
}

// ---------------------------------------------------------------------------

CriticalPointSummary summarize(const Params& p, const CriticalPoint& cp) {
  const double energy = cp.u0.all_finite() ? eval_primal(p, cp.u0) : 0.0;
  return {cp.converged, cp.iterations, cp.primal_grad_norm, cp.tolerance,
          std::isfinite(energy) ? energy : 0.0, cp.residual_history, cp.diagnostic};
}

json report_to_json(const RunReport& r) {
  json j{{"command", r.command},
         {"config", config_to_json(r.config)},
         {"exit_status", r.exit_status},
         {"status", r.status},
         {"timing", r.timing}};
  if (r.critical_point) j["critical_point"] = *r.critical_point;
  if (r.field_counts) {
    j["field"] = {{"header", field_header(GridSpec(*r.field_counts))},
                  {"interior_counts", *r.field_counts},
                  {"values", r.field}};
  }
  if (r.theorem) j["theorem"] = *r.theorem;
  if (r.sweep) j["sweep"] = *r.sweep;
  if (r.scan) j["scan"] = *r.scan;
  if (!r.conjugates.empty()) j["conjugates"] = {{"rows", r.conjugates}, {"max_abs_error", r.conjugate_max_error}};
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.exit_status = j.at("exit_status").get<int>();
  r.status = j.at("status").get<std::string>();
  r.timing = j.at("timing").get<std::map<std::string, double>>();
  if (j.contains("critical_point")) r.critical_point = j.at("critical_point").get<CriticalPointSummary>();
  if (j.contains("field")) {
    r.field_counts = j.at("field").at("interior_counts").get<std::vector<int>>();
    r.field = j.at("field").at("values").get<std::vector<double>>();
  }
  if (j.contains("theorem")) r.theorem = j.at("theorem").get<TheoremReport>();
  if (j.contains("sweep")) r.sweep = j.at("sweep").get<EpsilonSweep>();
  if (j.contains("scan")) r.scan = j.at("scan").get<ConcavityScan>();
  if (j.contains("conjugates")) {
    r.conjugates = j.at("conjugates").at("rows").get<std::vector<ConjugateRow>>();
    r.conjugate_max_error = j.at("conjugates").at("max_abs_error").get<double>();
  }
  return r;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string sweep_to_csv(const EpsilonSweep& sweep) {
  std::string out = "epsilon,K,gap,dual_grad_norm,min_eig_dual,max_eig_dual,predicted_min_eig\n";
  for (const auto& row : sweep.rows) {
    for (double v : {row.epsilon, row.K, row.gap, row.dual_grad_norm, row.min_eig_dual, row.max_eig_dual}) {
      out += format_double(v) + ",";
    }
    out += format_double(row.predicted_min_eig) + "\n";
  }
  return out;
}

std::string conjugates_to_csv(const std::vector<ConjugateRow>& rows) {
  std::string out = "term,coefficient,s,closed_form,oracle,abs_error\n";
  for (const auto& row : rows) {
    out += row.term + "," + format_double(row.coefficient) + "," + format_double(row.s) + "," +
           format_double(row.closed_form) + "," + format_double(row.oracle) + "," + format_double(row.abs_error) +
           "\n";
  }
  return out;
}

}  // namespace glpd
