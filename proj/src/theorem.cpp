#include "glpd/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "glpd/solve.hpp"

namespace glpd {

namespace {

Eigen::VectorXd random_unit_direction(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd d(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) d[i] = normal(rng);
  } while (d.norm() == 0.0);
  return d.normalized();
}

double max_row_sum(const Eigen::SparseMatrix<double>& m) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) sums[it.row()] += std::abs(it.value());
  }
  return sums.maxCoeff();
}

double dual_max_eig(const Params& p, const ScalarField& u) { return eigenvalues(hess_dual(p, u)).maxCoeff(); }
double primal_min_eig(const Params& p, const ScalarField& u) { return eigenvalues(hess_primal(p, u)).minCoeff(); }

// Largest t in [0, t_max] such that holds() on all of [0, t]: a coarse scan
// finds the first failing sample, bisection pins down the switch inside it.
double bisect_radius(const std::function<bool(double)>& holds, double t_max) {
  if (!(t_max > 0.0) || !holds(0.0)) return 0.0;
  double lo = 0.0;
  double hi = t_max;
  bool failed = false;
  for (int k = 1; k <= kRadiusCoarseSamples; ++k) {
    const double t = t_max * k / kRadiusCoarseSamples;
    if (!holds(t)) {
      hi = t;
      failed = true;
      break;
    }
    lo = t;
  }
  if (!failed) return t_max;
  for (int k = 0; k < kRadiusBisectionSteps; ++k) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

void require_verifiable(const Params& p, const CriticalPoint& u0, const char* what) {
  if (!u0.converged) throw std::invalid_argument(std::string(what) + ": critical point is not converged");
  require_same_grid(p.grid(), u0.u0.grid(), what);
  if (u0.u0.size() > kMaxDenseDimension) {
    throw std::length_error(std::string(what) + ": grid too large for dense Hessians");
  }
}

}  // namespace

EpsilonSweep epsilon_sweep(const Params& p, const CriticalPoint& u0, const std::vector<double>& eps_list,
                           double gap_rel, double ratio_rel) {
  require_verifiable(p, u0, "epsilon_sweep");
  EpsilonSweep sweep;
  sweep.gap_rel = gap_rel;
  sweep.ratio_rel = ratio_rel;
  sweep.max_eig_primal = eigenvalues(hess_primal(p, u0.u0)).maxCoeff();

  for (double eps : eps_list) {
    const Params pe = p.with_epsilon(eps);
    SweepRow row;
    row.epsilon = eps;
    row.K = pe.K;
    const double j = eval_primal(pe, u0.u0);
    row.gap = j - eval_dual(pe, u0.u0);
    row.dual_grad_norm = grad_dual(pe, u0.u0).max_abs();
    const Eigen::VectorXd ev = eigenvalues(hess_dual(pe, u0.u0));
    row.min_eig_dual = ev.minCoeff();
    row.max_eig_dual = ev.maxCoeff();
    const double shifted = sweep.max_eig_primal - eps;
    row.predicted_min_eig = -shifted * shifted / eps;
    if (std::abs(row.gap) > gap_rel * (1.0 + std::abs(j))) sweep.gaps_ok = false;
    if (row.predicted_min_eig != 0.0) {
      sweep.max_tracking_deviation =
          std::max(sweep.max_tracking_deviation, std::abs(row.min_eig_dual / row.predicted_min_eig - 1.0));
    }
    sweep.rows.push_back(row);
  }

  const double max_eps = eps_list.empty() ? 0.0 : *std::max_element(eps_list.begin(), eps_list.end());
  sweep.ratios_applicable = eps_list.size() >= 2 && sweep.max_eig_primal >= 10.0 * max_eps;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    const double observed = sweep.rows[i].min_eig_dual / sweep.rows[i - 1].min_eig_dual;
    const double expected = sweep.rows[i - 1].epsilon / sweep.rows[i].epsilon;
    const double deviation = std::abs(observed / expected - 1.0);
    sweep.max_ratio_deviation = std::max(sweep.max_ratio_deviation, deviation);
    if (!(deviation <= ratio_rel)) sweep.ratios_ok = false;
  }
  return sweep;
}

TheoremReport verify_theorem(const Params& p, const CriticalPoint& u0, const TheoremTolerances& tol) {
  require_verifiable(p, u0, "verify_theorem");
  const ScalarField& u = u0.u0;
  const double eps = p.epsilon;

  TheoremReport r;
  r.tolerances = tol;
  r.epsilon = eps;

  // (a)
  r.primal_grad_norm = grad_primal(p, u).max_abs();
  r.primal_grad_ok = r.primal_grad_norm <= tol.primal_grad;

  // (b)
  const Eigen::MatrixXd h = hess_primal(p, u).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> h_eig(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = h_eig.eigenvalues();
  r.min_eig_primal_hessian = mu.minCoeff();
  r.max_eig_primal_hessian = mu.maxCoeff();
  r.hypothesis_satisfied = r.min_eig_primal_hessian > 0.0;
  r.epsilon_small = eps <= 0.5 * r.min_eig_primal_hessian;

  // (c)
  r.dual_grad_norm = grad_dual(p, u).max_abs();
  r.dual_grad_tolerance = max_row_sum(shifted_hessian(p, u).sparse()) / eps * tol.primal_grad;
  r.dual_grad_ok = r.dual_grad_norm <= r.dual_grad_tolerance;

  // (d)
  r.primal_value = eval_primal(p, u);
  r.dual_value = eval_dual(p, u);
  r.duality_gap = r.primal_value - r.dual_value;
  r.gap_tolerance = tol.gap_rel * (1.0 + std::abs(r.primal_value));
  r.gap_ok = std::abs(r.duality_gap) <= r.gap_tolerance;

  // (e)
  const Eigen::MatrixXd hd = hess_dual(p, u).dense();
  const Eigen::MatrixXd shifted = h - eps * Eigen::MatrixXd::Identity(h.rows(), h.cols());
  const Eigen::MatrixXd predicted = -shifted - (shifted * shifted) / eps;
  r.hessian_identity_residual = (hd - predicted).cwiseAbs().maxCoeff();
  r.hessian_identity_tolerance = tol.hessian_identity_rel * h.cwiseAbs().maxCoeff();
  r.hessian_identity_ok = r.hessian_identity_residual <= r.hessian_identity_tolerance;

  // Spectral map mu -> -(mu - eps) - (mu - eps)^2 / eps on sorted spectra.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hd_eig(hd, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd nu = hd_eig.eigenvalues();
  std::vector<double> mapped(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double s = mu[i] - eps;
    mapped[static_cast<std::size_t>(i)] = -s - s * s / eps;
  }
  std::sort(mapped.begin(), mapped.end());
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    r.spectral_map_residual = std::max(r.spectral_map_residual, std::abs(nu[i] - mapped[static_cast<std::size_t>(i)]));
  }
  r.spectral_map_tolerance = tol.spectral_map_rel * mu.cwiseAbs().maxCoeff();
  r.spectral_map_ok = r.spectral_map_residual <= r.spectral_map_tolerance;

  // (f)
  r.min_eig_dual_hessian = nu.minCoeff();
  r.max_eig_dual_hessian = nu.maxCoeff();
  r.dual_concave = r.max_eig_dual_hessian < 0.0;

  // (g)
  r.sweep = epsilon_sweep(p, u0, tol.sweep_eps, tol.gap_rel, tol.sweep_rel);
  for (const auto& row : r.sweep.rows) r.epsilon_scaling.emplace_back(row.epsilon, row.min_eig_dual);
  r.scaling_ok = r.sweep.gaps_ok && r.sweep.max_tracking_deviation <= tol.sweep_rel &&
                 (!r.sweep.ratios_applicable || r.sweep.ratios_ok);

  // (h)
  std::mt19937_64 rng(tol.seed);
  const double j0 = r.primal_value;
  const double jhat0 = r.dual_value;
  for (int k = 0; k < tol.perturbations; ++k) {
    const Eigen::VectorXd delta = tol.perturbation_norm * random_unit_direction(rng, u.size());
    const ScalarField moved = ScalarField::unchecked(u.grid(), u.values() + delta);
    if (eval_primal(p, moved) < j0 - tol.perturbation_slack) ++r.primal_violations;
    if (eval_dual(p, moved) > jhat0 + tol.perturbation_slack) ++r.dual_violations;
    ++r.perturbation_count;
  }
  r.perturbation_ok = r.primal_violations == 0 && r.dual_violations == 0;

  r.passed = r.primal_grad_ok && r.hypothesis_satisfied && r.dual_grad_ok && r.gap_ok && r.hessian_identity_ok &&
             r.spectral_map_ok && r.dual_concave && r.scaling_ok && r.perturbation_ok;
  return r;
}

ConcavityScan concavity_radius(const Params& p, const CriticalPoint& u0, int n_directions, double t_max,
                               std::uint64_t seed) {
  require_verifiable(p, u0, "concavity_radius");
  if (n_directions < 1) throw std::invalid_argument("concavity_radius: need at least one direction");
  const ScalarField& u = u0.u0;

  ConcavityScan scan;
  scan.directions = n_directions;
  scan.t_max = std::max(t_max, 0.0);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_directions; ++k) {
    const Eigen::VectorXd d = random_unit_direction(rng, u.size());
    auto along = [&](double t) { return ScalarField::unchecked(u.grid(), u.values() + t * d); };
    scan.t_per_direction.push_back(
        bisect_radius([&](double t) { return dual_max_eig(p, along(t)) <= 0.0; }, scan.t_max));
    scan.primal_convexity_t.push_back(
        bisect_radius([&](double t) { return primal_min_eig(p, along(t)) >= 0.0; }, scan.t_max));
  }
  scan.min_dual_radius = *std::min_element(scan.t_per_direction.begin(), scan.t_per_direction.end());
  scan.min_primal_radius = *std::min_element(scan.primal_convexity_t.begin(), scan.primal_convexity_t.end());
  return scan;
}

}  // namespace glpd
