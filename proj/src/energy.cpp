#include "glpd/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace glpd {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("params.") + name + ": must be a finite value > 0, got " +
                                std::to_string(v));
  }
}

Eigen::VectorXd cube(const Eigen::VectorXd& u) { return u.array().cube().matrix(); }

// 3 alpha u^2 - shift
Eigen::VectorXd primal_potential_curvature(const Params& p, const ScalarField& u, double shift) {
  return (3.0 * p.alpha * u.values().array().square() - shift).matrix();
}

SymmetricOperator curvature_operator(const Params& p, const ScalarField& u, double shift) {
  const GridSpec grid = u.grid();
  const double gamma = p.gamma;
  Eigen::VectorXd diag = primal_potential_curvature(p, u, shift);
  auto apply = [grid, gamma, diag](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const ScalarField wf = ScalarField::unchecked(grid, w);
    return -gamma * laplacian(wf).values() + diag.cwiseProduct(w);
  };
  auto assemble = [grid, gamma, diag] {
    Eigen::SparseMatrix<double> m = -gamma * laplacian_matrix(grid);
    for (Eigen::Index i = 0; i < diag.size(); ++i) m.coeffRef(i, i) += diag[i];
    return m;
  };
  return SymmetricOperator(grid.size(), apply, assemble);
}

}  // namespace

Params Params::make(double gamma, double alpha, double beta, double epsilon, std::optional<double> K,
                    ScalarField f) {
  Params p{gamma, alpha, beta, epsilon, K.value_or(beta + epsilon + 1.0), std::move(f)};
  p.validate();
  return p;
}

void Params::validate() const {
  require_positive(gamma, "gamma");
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(epsilon, "epsilon");
  if (!std::isfinite(K) || !(K > beta + epsilon)) {
    throw std::invalid_argument("params.K: must exceed beta + epsilon = " + std::to_string(beta + epsilon) +
                                ", got " + std::to_string(K));
  }
  if (!f.all_finite()) throw std::invalid_argument("params.f: non-finite source value");
}

Params Params::with_epsilon(double eps) const { return make(gamma, alpha, beta, eps, beta + eps + 1.0, f); }

// ---------------------------------------------------------------------------

double eval_primal(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "eval_primal");
  const double w = u.grid().cell_volume();
  const auto sq = u.values().array().square();
  return 0.5 * p.gamma * dirichlet_energy(u) + 0.25 * p.alpha * sq.square().sum() * w -
         0.5 * p.beta * sq.sum() * w - inner(u, p.f);
}

ScalarField grad_primal(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "grad_primal");
  Eigen::VectorXd g = -p.gamma * laplacian(u).values() + p.alpha * cube(u.values()) - p.beta * u.values() -
                      p.f.values();
  return ScalarField::unchecked(u.grid(), std::move(g));
}

SymmetricOperator hess_primal(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "hess_primal");
  return curvature_operator(p, u, p.beta);
}

SymmetricOperator shifted_hessian(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "shifted_hessian");
  return curvature_operator(p, u, p.beta + p.epsilon);
}

ScalarField residual_shifted(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "residual_shifted");
  Eigen::VectorXd r = -p.gamma * laplacian(u).values() + p.alpha * cube(u.values()) -
                      (p.beta + p.epsilon) * u.values() - p.f.values();
  return ScalarField::unchecked(u.grid(), std::move(r));
}

double eval_dual(const Params& p, const ScalarField& uhat) {
  require_same_grid(p.grid(), uhat.grid(), "eval_dual");
  const double w = uhat.grid().cell_volume();
  const auto sq = uhat.values().array().square();
  const ScalarField r = residual_shifted(p, uhat);
  return -0.5 * p.gamma * dirichlet_energy(uhat) - 0.75 * p.alpha * sq.square().sum() * w +
         0.5 * (p.beta + p.epsilon) * sq.sum() * w - inner(r, r) / (2.0 * p.epsilon);
}

ScalarField grad_dual(const Params& p, const ScalarField& uhat) {
  require_same_grid(p.grid(), uhat.grid(), "grad_dual");
  const ScalarField r = residual_shifted(p, uhat);
  const Eigen::VectorXd a_r = shifted_hessian(p, uhat).apply(r.values());
  Eigen::VectorXd g = p.gamma * laplacian(uhat).values() - 3.0 * p.alpha * cube(uhat.values()) +
                      (p.beta + p.epsilon) * uhat.values() - a_r / p.epsilon;
  return ScalarField::unchecked(uhat.grid(), std::move(g));
}

SymmetricOperator hess_dual(const Params& p, const ScalarField& uhat) {
  require_same_grid(p.grid(), uhat.grid(), "hess_dual");
  const GridSpec grid = uhat.grid();
  const double gamma = p.gamma;
  const double eps = p.epsilon;
  const SymmetricOperator shifted = shifted_hessian(p, uhat);
  const Eigen::VectorXd r = residual_shifted(p, uhat).values();
  const Eigen::VectorXd u = uhat.values();
  // Everything that is diagonal: -9 alpha u^2 + beta + eps - 6 alpha u r / eps.
  const Eigen::VectorXd diag =
      (-9.0 * p.alpha * u.array().square() + (p.beta + p.epsilon) - 6.0 * p.alpha * u.array() * r.array() / eps)
          .matrix();

  auto apply = [grid, gamma, eps, shifted, diag](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const ScalarField wf = ScalarField::unchecked(grid, w);
    return gamma * laplacian(wf).values() + diag.cwiseProduct(w) - shifted.apply(shifted.apply(w)) / eps;
  };
  auto assemble = [grid, gamma, eps, shifted, diag] {
    const Eigen::SparseMatrix<double> a = shifted.sparse();
    Eigen::SparseMatrix<double> a2 = (a * a).pruned();
    Eigen::SparseMatrix<double> m = gamma * laplacian_matrix(grid) - a2 / eps;
    for (Eigen::Index i = 0; i < diag.size(); ++i) m.coeffRef(i, i) += diag[i];
    return m;
  };
  return SymmetricOperator(grid.size(), apply, assemble);
}

// ---------------------------------------------------------------------------

double g0_primal(const Params& p, const VectorField& grad_u) {
  require_same_grid(p.grid(), grad_u.grid(), "g0_primal");
  return 0.5 * p.gamma * inner_edges(grad_u, grad_u);
}

double g1_primal(const Params& p, const ScalarField& u) {
  require_same_grid(p.grid(), u.grid(), "g1_primal");
  return 0.25 * p.alpha * u.values().array().square().square().sum() * u.grid().cell_volume();
}

double g2_primal(const Params& p, const ScalarField& u) { return 0.5 * p.g2_coefficient() * inner(u, u); }

double g3_primal(const Params& p, const ScalarField& u) { return 0.5 * p.epsilon * inner(u, u); }

double f_primal(const Params& p, const ScalarField& u) { return 0.5 * p.K * inner(u, u); }

}  // namespace glpd
