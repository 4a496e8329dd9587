#pragma once

// File formats: field files, experiment configs and run reports.
//
// Field file:
//   glpd-field v1 d=<dim> n=<n1[,n2[,n3]]>
//   <one value per line, row-major, 17 significant digits>
//
// Configs and reports are JSON; doubles are written with enough digits to
// round-trip exactly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glpd/energy.hpp"
#include "glpd/theorem.hpp"

namespace glpd {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A config problem, tagged with the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

void write_field(std::ostream& out, const ScalarField& u);
ScalarField read_field(std::istream& in);
void save_field(const std::filesystem::path& path, const ScalarField& u);
ScalarField load_field(const std::filesystem::path& path);
std::string field_to_string(const ScalarField& u);

// ---------------------------------------------------------------------------

struct ProfileSpec {
  enum class Kind { zero, constant, bump, file };
  Kind kind = Kind::zero;
  double value = 1.0;  // constant value, or bump amplitude
  std::string path;    // for Kind::file; relative to the config file

  bool operator==(const ProfileSpec&) const = default;
};

struct ScanSpec {
  int n_directions = 8;
  double t_max = 1.0;

  bool operator==(const ScanSpec&) const = default;
};

struct ExperimentConfig {
  std::vector<int> interior_counts{1};
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double epsilon = 1e-2;
  std::optional<double> K;

  ProfileSpec source{ProfileSpec::Kind::zero, 0.0, {}};
  ProfileSpec init{ProfileSpec::Kind::bump, 1.0, {}};

  double tol = 1e-12;
  int max_iter = 50;
  std::uint64_t seed = 1;
  int n_starts = 16;

  double verify_primal_tol = 1e-10;

  std::vector<double> eps_list;
  std::optional<ScanSpec> scan;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
/// Throws ConfigError naming the field path (e.g. "params.beta").
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

GridSpec make_grid(const ExperimentConfig& c);
/// Samples a profile on the grid; file paths resolve against base_dir.
ScalarField make_profile(const ProfileSpec& spec, const GridSpec& grid, const std::filesystem::path& base_dir,
                         const std::string& config_path);
/// Builds and validates Params; violations become ConfigError.
Params make_params(const ExperimentConfig& c, const std::filesystem::path& base_dir);

// ---------------------------------------------------------------------------

struct CriticalPointSummary {
  bool converged = false;
  int iterations = 0;
  double primal_grad_norm = 0.0;
  double tolerance = 0.0;
  double energy = 0.0;
  std::vector<double> residual_history;
  std::string diagnostic;

  bool operator==(const CriticalPointSummary&) const = default;
};

CriticalPointSummary summarize(const Params& p, const CriticalPoint& cp);

struct ConjugateRow {
  std::string term;
  double coefficient = 0.0;
  double s = 0.0;
  double closed_form = 0.0;
  double oracle = 0.0;
  double abs_error = 0.0;

  bool operator==(const ConjugateRow&) const = default;
};

struct RunReport {
  std::string command;
  ExperimentConfig config;
  int exit_status = 0;
  std::string status;
  std::optional<CriticalPointSummary> critical_point;
  std::optional<std::vector<int>> field_counts;  // grid of `field`
  std::vector<double> field;                     // u0, row-major
  std::optional<TheoremReport> theorem;
  std::optional<EpsilonSweep> sweep;
  std::optional<ConcavityScan> scan;
  std::vector<ConjugateRow> conjugates;
  double conjugate_max_error = 0.0;
  /// Wall-clock seconds per phase; excluded from determinism comparisons.
  std::map<std::string, double> timing;
};

nlohmann::json report_to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

std::string sweep_to_csv(const EpsilonSweep& sweep);
std::string conjugates_to_csv(const std::vector<ConjugateRow>& rows);

/// %.17g
std::string format_double(double v);

}  // namespace glpd
