#pragma once

// Numerical verification of the local primal-dual correspondence at a primal
// critical point u0 with positive definite second variation H:
//
//   grad_dual(u0) = 0,   J(u0) = Jhat(u0),
//   hess_dual(u0) = -(H - eps) - (H - eps)^2 / eps,
//
// plus sampled local min/max behaviour and the measured concavity region.

#include <cstdint>
#include <utility>
#include <vector>

#include "glpd/energy.hpp"

namespace glpd {

struct TheoremTolerances {
  double primal_grad = 1e-10;           // clause (a), sup-norm
  double gap_rel = 1e-10;               // |J - Jhat| <= gap_rel (1 + |J|)
  double hessian_identity_rel = 1e-8;   // relative to max |H_ij|
  double spectral_map_rel = 1e-8;       // relative to max |eig(H)|
  double sweep_rel = 0.15;              // eps-scaling tracking and ratios
  std::vector<double> sweep_eps{1e-1, 1e-2, 1e-3};
  int perturbations = 100;
  double perturbation_norm = 1e-3;
  double perturbation_slack = 1e-12;
  std::uint64_t seed = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  double K = 0.0;
  double gap = 0.0;
  double dual_grad_norm = 0.0;
  double min_eig_dual = 0.0;
  double max_eig_dual = 0.0;
  /// -(lambda_max(H) - eps)^2 / eps
  double predicted_min_eig = 0.0;
};

struct EpsilonSweep {
  std::vector<SweepRow> rows;
  double max_eig_primal = 0.0;
  double gap_rel = 1e-10;
  double ratio_rel = 0.15;
  bool gaps_ok = true;
  /// Successive min_eig_dual ratios are compared with the eps ratios only
  /// when lambda_max(H) >= 10 max(eps).
  bool ratios_applicable = false;
  bool ratios_ok = true;
  double max_ratio_deviation = 0.0;
  /// max |min_eig_dual / predicted_min_eig - 1|
  double max_tracking_deviation = 0.0;
};

struct TheoremReport {
  double epsilon = 0.0;
  double primal_value = 0.0;
  double dual_value = 0.0;

  double primal_grad_norm = 0.0;
  bool primal_grad_ok = false;

  double min_eig_primal_hessian = 0.0;
  double max_eig_primal_hessian = 0.0;
  bool hypothesis_satisfied = false;  // lambda_min(H) > 0
  bool epsilon_small = false;         // eps <= lambda_min(H) / 2, reported only

  double dual_grad_norm = 0.0;
  double dual_grad_tolerance = 0.0;
  bool dual_grad_ok = false;

  double duality_gap = 0.0;  // J(u0) - Jhat(u0)
  double gap_tolerance = 0.0;
  bool gap_ok = false;

  double hessian_identity_residual = 0.0;
  double hessian_identity_tolerance = 0.0;
  bool hessian_identity_ok = false;

  double spectral_map_residual = 0.0;
  double spectral_map_tolerance = 0.0;
  bool spectral_map_ok = false;

  double min_eig_dual_hessian = 0.0;
  double max_eig_dual_hessian = 0.0;
  bool dual_concave = false;

  std::vector<std::pair<double, double>> epsilon_scaling;  // (eps, min_eig_dual)
  EpsilonSweep sweep;
  bool scaling_ok = false;

  int perturbation_count = 0;
  int primal_violations = 0;
  int dual_violations = 0;
  bool perturbation_ok = false;

  TheoremTolerances tolerances;
  bool passed = false;
};

/// Throws std::invalid_argument if u0 is not converged and std::length_error
/// if the grid is too large for dense Hessians.
TheoremReport verify_theorem(const Params& p, const CriticalPoint& u0, const TheoremTolerances& tol = {});

/// Gap, dual gradient and dual Hessian extremes for each eps, with
/// K = beta + eps + 1.
EpsilonSweep epsilon_sweep(const Params& p, const CriticalPoint& u0, const std::vector<double>& eps_list,
                           double gap_rel = 1e-10, double ratio_rel = 0.15);

struct ConcavityScan {
  int directions = 0;
  double t_max = 0.0;
  std::vector<double> t_per_direction;     // dual Hessian stays <= 0
  std::vector<double> primal_convexity_t;  // primal Hessian stays >= 0
  double min_dual_radius = 0.0;
  double min_primal_radius = 0.0;
};

inline constexpr int kRadiusBisectionSteps = 20;
inline constexpr int kRadiusCoarseSamples = 32;

/// Largest t in [0, t_max] along seeded random unit directions for which the
/// dual Hessian is negative semidefinite (and, separately, the primal one
/// positive semidefinite) on the whole segment [0, t]. The first failure on a
/// grid of kRadiusCoarseSamples steps is refined by bisection.
ConcavityScan concavity_radius(const Params& p, const CriticalPoint& u0, int n_directions, double t_max,
                               std::uint64_t seed);

}  // namespace glpd
