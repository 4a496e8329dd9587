#include "glpd/solve.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace glpd {

namespace {

double sup_norm(const ScalarField& g) { return g.max_abs(); }

struct PowerResult {
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Dominant eigenpair of (op - shift I) by power iteration, Rayleigh quotient
// estimate. The residual is measured on the shifted operator, which has the
// same eigenvectors.
PowerResult power_iteration(const SymmetricOperator& op, double shift, double tol, int max_iter) {
  const Eigen::Index n = op.dimension();
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
  v.normalize();

  PowerResult out;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd w = op.apply(v) - shift * v;
    out.lambda = v.dot(w);
    out.residual = (w - out.lambda * v).norm();
    out.iterations = it;
    const double wn = w.norm();
    if (out.residual <= tol * std::max(1.0, std::abs(out.lambda)) || wn == 0.0) {
      out.converged = true;
      return out;
    }
    v = w / wn;
  }
  return out;
}

}  // namespace

CriticalPoint newton_primal(const Params& p, const ScalarField& u_init, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("newton_primal: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("newton_primal: max_iter must be >= 1");
  require_same_grid(p.grid(), u_init.grid(), "newton_primal");

  CriticalPoint cp{u_init, 0.0, tol, false, 0, {}, {}};
  ScalarField g = grad_primal(p, cp.u0);
  cp.primal_grad_norm = sup_norm(g);
  cp.residual_history.push_back(cp.primal_grad_norm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  while (true) {
    if (cp.primal_grad_norm <= tol) {
      cp.converged = true;
      return cp;
    }
    if (cp.iterations >= max_iter) {
      cp.diagnostic = "iteration limit reached";
      return cp;
    }

    const Eigen::SparseMatrix<double> h = hess_primal(p, cp.u0).sparse();
    lu.compute(h);
    if (lu.info() != Eigen::Success) {
      cp.diagnostic = "singular Newton system: " + lu.lastErrorMessage();
      return cp;
    }
    const Eigen::VectorXd step = lu.solve(-g.values());
    if (lu.info() != Eigen::Success || !step.allFinite()) {
      cp.diagnostic = "singular Newton system: non-finite step";
      return cp;
    }

    const double merit = g.values().norm();
    bool accepted = false;
    for (double t = 1.0; t >= kNewtonDampingFloor; t *= 0.5) {
      ScalarField trial = ScalarField::unchecked(cp.u0.grid(), cp.u0.values() + t * step);
      ScalarField g_trial = grad_primal(p, trial);
      const double m = g_trial.values().norm();
      if (std::isfinite(m) && m < merit) {
        cp.u0 = std::move(trial);
        g = std::move(g_trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      cp.diagnostic = "damping floor reached without residual decrease";
      return cp;
    }
    ++cp.iterations;
    cp.primal_grad_norm = sup_norm(g);
    cp.residual_history.push_back(cp.primal_grad_norm);
  }
}

// ---------------------------------------------------------------------------

AscentResult ascend_dual(const Params& p, const ScalarField& uhat_init, double tol, int max_iter,
                         const AscentOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("ascend_dual: tol must be > 0");
  require_same_grid(p.grid(), uhat_init.grid(), "ascend_dual");

  AscentResult out{uhat_init, 0.0, 0, false, false, 0, {}};
  double value = eval_dual(p, out.uhat);
  ScalarField g = grad_dual(p, out.uhat);
  out.grad_norm = sup_norm(g);
  out.values.push_back(value);

  while (out.iterations < max_iter) {
    if (out.grad_norm <= tol) break;

    Eigen::VectorXd direction = g.values();
    double t = options.initial_step;
    bool newton_step = false;
    const SymmetricOperator hess = hess_dual(p, out.uhat);
    // Start from the exact maximiser of the quadratic model along g when the
    // model is concave there; a unit step can jump into a different basin.
    const double curvature = g.values().dot(hess.apply(g.values()));
    if (curvature < 0.0) t = std::min(t, -g.values().squaredNorm() / curvature);
    if (options.newton && out.uhat.size() <= kMaxDenseDimension) {
      const Eigen::MatrixXd neg_hess = -hess.dense();
      Eigen::LLT<Eigen::MatrixXd> llt(neg_hess);
      if (llt.info() == Eigen::Success) {
        direction = llt.solve(g.values());
        t = 1.0;
        newton_step = true;
      }
    }
    const double slope = g.values().dot(direction) * out.uhat.grid().cell_volume();

    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k, t *= options.shrink) {
      ScalarField trial = ScalarField::unchecked(out.uhat.grid(), out.uhat.values() + t * direction);
      const double v = eval_dual(p, trial);
      if (std::isfinite(v) && v >= value + options.armijo_slope * t * slope) {
        out.uhat = std::move(trial);
        value = v;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.line_search_failed = true;
      break;
    }
    if (newton_step) ++out.newton_steps;
    ++out.iterations;
    g = grad_dual(p, out.uhat);
    out.grad_norm = sup_norm(g);
    out.values.push_back(value);
  }
  out.converged = out.grad_norm <= tol;
  return out;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd eigenvalues(const SymmetricOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalues: dense eigensolver failed");
  return solver.eigenvalues();
}

SpectrumReport spectrum(const SymmetricOperator& op, SpectrumMethod mode, double tol) {
  SpectrumReport report;
  report.method = mode;
  if (mode == SpectrumMethod::dense) {
    const Eigen::VectorXd ev = eigenvalues(op);
    report.min_eig = ev[0];
    report.max_eig = ev[ev.size() - 1];
    report.iterations = 1;
    return report;
  }

  const int limit = static_cast<int>(10 * op.dimension());
  const PowerResult dominant = power_iteration(op, 0.0, tol, limit);
  const PowerResult far_end = power_iteration(op, dominant.lambda, tol, limit);
  const double other = dominant.lambda + far_end.lambda;
  report.min_eig = std::min(dominant.lambda, other);
  report.max_eig = std::max(dominant.lambda, other);
  report.iterations = dominant.iterations + far_end.iterations;
  report.residual = std::max(dominant.residual, far_end.residual);
  report.converged = dominant.converged && far_end.converged;
  return report;
}

// ---------------------------------------------------------------------------

MultistartResult multistart_oracle(const Params& p, int n_starts, std::uint64_t seed) {
  const GridSpec& grid = p.grid();
  const Eigen::Index n = grid.size();
  if (n > kMultistartMaxNodes) {
    throw std::invalid_argument("multistart_oracle: at most " + std::to_string(kMultistartMaxNodes) +
                                " nodes supported, got " + std::to_string(n));
  }

  MultistartResult out;
  out.best_energy = std::numeric_limits<double>::infinity();
  auto consider = [&out](double energy, const ScalarField& u) {
    if (energy < out.best_energy) {
      out.best_energy = energy;
      out.best_field = u;
    }
  };
  auto run_newton = [&](const ScalarField& start) {
    ++out.newton_runs;
    CriticalPoint cp = newton_primal(p, start, 1e-10, 100);
    if (!cp.converged) return;
    ++out.newton_converged;
    consider(eval_primal(p, cp.u0), cp.u0);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-kMultistartRange, kMultistartRange);
  for (int s = 0; s < n_starts; ++s) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    run_newton(ScalarField(grid, std::move(v)));
  }

  if (n <= kMultistartGridSearchMaxNodes) {
    const int per_axis = static_cast<int>(std::lround(2.0 * kMultistartRange / kMultistartGridStep)) + 1;
    std::vector<int> odometer(static_cast<std::size_t>(n), 0);
    ScalarField u(grid);
    double best_grid = std::numeric_limits<double>::infinity();
    ScalarField best_grid_point(grid);
    while (true) {
      for (Eigen::Index i = 0; i < n; ++i) u[i] = -kMultistartRange + odometer[i] * kMultistartGridStep;
      const double e = eval_primal(p, u);
      ++out.grid_points;
      if (e < best_grid) {
        best_grid = e;
        best_grid_point = u;
      }
      Eigen::Index axis = 0;
      while (axis < n && ++odometer[axis] == per_axis) odometer[axis++] = 0;
      if (axis == n) break;
    }
    consider(best_grid, best_grid_point);
    run_newton(best_grid_point);
  }
  return out;
}

}  // namespace glpd
