#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glpd/energy.hpp"

namespace glpd {

/// Smallest step fraction tried by the damped Newton iteration.
inline constexpr double kNewtonDampingFloor = 1e-4;

/// Damped Newton on grad_primal(u) = 0. Each step solves
/// hess_primal(u) d = -grad_primal(u) and halves the step until the residual
/// 2-norm decreases, giving up below kNewtonDampingFloor. Never throws on a
/// singular system; that is reported as converged = false with a diagnostic.
CriticalPoint newton_primal(const Params& p, const ScalarField& u_init, double tol, int max_iter);

struct AscentOptions {
  double armijo_slope = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
  double initial_step = 1.0;
  /// Take Newton steps on hess_dual whenever it is negative definite.
  bool newton = false;
};

struct AscentResult {
  ScalarField uhat;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  int newton_steps = 0;
  /// Jhat at the start and after every accepted step.
  std::vector<double> values;
};

/// Backtracking (Armijo) ascent on eval_dual. Gradient steps start from
/// min(initial_step, |g|^2 / |g.Hg|) when g.Hg < 0. Returns the best iterate.
AscentResult ascend_dual(const Params& p, const ScalarField& uhat_init, double tol, int max_iter,
                         const AscentOptions& options = {});

enum class SpectrumMethod { dense, iterative };

struct SpectrumReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  SpectrumMethod method = SpectrumMethod::dense;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// Extreme eigenvalues. Dense mode diagonalises the assembled matrix (and so
/// inherits its size cap); iterative mode runs power iteration for the
/// dominant eigenvalue and again on the shifted operator for the other end,
/// each phase limited to 10 N iterations with residual |Av - lv| <= tol.
SpectrumReport spectrum(const SymmetricOperator& op, SpectrumMethod mode, double tol = 1e-10);

/// All eigenvalues of the dense assembly in ascending order.
Eigen::VectorXd eigenvalues(const SymmetricOperator& op);

struct MultistartResult {
  double best_energy = 0.0;
  std::optional<ScalarField> best_field;
  int newton_runs = 0;
  int newton_converged = 0;
  long long grid_points = 0;
};

inline constexpr Eigen::Index kMultistartMaxNodes = 8;
inline constexpr Eigen::Index kMultistartGridSearchMaxNodes = 4;
inline constexpr double kMultistartRange = 3.0;
inline constexpr double kMultistartGridStep = 0.25;

/// Brute-force global minimisation of eval_primal for tiny grids: damped
/// Newton from n_starts uniform random fields in [-3,3]^N plus, for N <= 4, an
/// exhaustive lattice scan with spacing 0.25 whose best point seeds one more
/// Newton run. Throws std::invalid_argument for N > 8.
MultistartResult multistart_oracle(const Params& p, int n_starts, std::uint64_t seed);

}  // namespace glpd
