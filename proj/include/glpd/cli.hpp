#pragma once

// Batch front end: one subcommand per experiment, each producing a RunReport
// plus the text files to place under the output directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "glpd/io.hpp"

namespace glpd::cli {

enum ExitStatus : int {
  kVerified = 0,
  kFailed = 1,
  kNotApplicable = 2,
  kNotConverged = 3,
  kConfigError = 4,
};

struct Outcome {
  RunReport report;
  /// file name -> contents; report.json is added by write_outputs.
  std::map<std::string, std::string> files;
};

/// Values for the conjugate table: -9.6, -9.2, ..., 10.0.
std::vector<double> conjugate_arguments();
inline constexpr double kConjugateOracleStep = 1e-4;

// Relative field paths in the config resolve against base_dir.
Outcome cmd_solve(const ExperimentConfig& config, const std::filesystem::path& base_dir);
Outcome cmd_verify(const ExperimentConfig& config, const std::filesystem::path& base_dir);
Outcome cmd_conjugate_check(const ExperimentConfig& config, const std::filesystem::path& base_dir);
Outcome cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& base_dir);
Outcome cmd_scan(const ExperimentConfig& config, const std::filesystem::path& base_dir);

/// Writes report.json and every entry of outcome.files into dir.
void write_outputs(const Outcome& outcome, const std::filesystem::path& dir);

/// glpd <solve|verify|conjugate-check|sweep|scan> CONFIG [--out DIR]
///      [--seed N] [--eps E1,E2,...] [--quiet]
int run(int argc, char** argv);

}  // namespace glpd::cli
