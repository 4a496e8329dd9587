#pragma once

// Primal energy
//
//   J(u) = gamma/2 |grad u|^2 + alpha/4 u^4 - beta/2 u^2 - u f
//
// integrated with the mesh quadrature, and the reduced dual functional
//
//   Jhat(w) = -gamma/2 |grad w|^2 - 3 alpha/4 w^4 + (beta+eps)/2 w^2
//             - 1/(2 eps) r(w)^2,
//   r(w)    = -gamma lap w + alpha w^3 - (beta+eps) w - f.
//
// All gradients are taken against the quadrature-weighted inner product, so a
// gradient field is the strong-form residual itself.

#include <optional>
#include <string>
#include <vector>

#include "glpd/mesh.hpp"
#include "glpd/symmetric_operator.hpp"

namespace glpd {

struct Params {
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double epsilon = 1e-2;
  double K = 0.0;
  ScalarField f;

  /// Builds and validates. K defaults to beta + epsilon + 1.
  static Params make(double gamma, double alpha, double beta, double epsilon, std::optional<double> K,
                     ScalarField f);

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Same problem with a different epsilon; K is re-derived as beta+eps+1.
  Params with_epsilon(double eps) const;

  const GridSpec& grid() const { return f.grid(); }

  /// K - beta - epsilon, the coefficient of G2.
  double g2_coefficient() const { return K - beta - epsilon; }
};

struct CriticalPoint {
  ScalarField u0;
  double primal_grad_norm = 0.0;  // sup-norm of grad_primal(u0)
  double tolerance = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  std::string diagnostic;
};

double eval_primal(const Params& p, const ScalarField& u);
ScalarField grad_primal(const Params& p, const ScalarField& u);

/// -gamma lap + 3 alpha u^2 - beta.
SymmetricOperator hess_primal(const Params& p, const ScalarField& u);

/// grad_primal(u) - eps u.
ScalarField residual_shifted(const Params& p, const ScalarField& u);

double eval_dual(const Params& p, const ScalarField& uhat);
ScalarField grad_dual(const Params& p, const ScalarField& uhat);

/// gamma lap - 9 alpha w^2 + (beta+eps) - (A^2 + 6 alpha diag(w r(w))) / eps,
/// A = -gamma lap + 3 alpha w^2 - (beta+eps).
SymmetricOperator hess_dual(const Params& p, const ScalarField& uhat);

/// A above: the primal Hessian shifted by -eps.
SymmetricOperator shifted_hessian(const Params& p, const ScalarField& u);

// Pieces of the splitting J = G0 + G1 + G2 + G3 - F - <u, f>.
double g0_primal(const Params& p, const VectorField& grad_u);  // gamma/2 |v|^2
double g1_primal(const Params& p, const ScalarField& u);       // alpha/4 u^4
double g2_primal(const Params& p, const ScalarField& u);       // (K-beta-eps)/2 u^2
double g3_primal(const Params& p, const ScalarField& u);       // eps/2 u^2
double f_primal(const Params& p, const ScalarField& u);        // K/2 u^2

}  // namespace glpd
