#pragma once

// Fenchel conjugates of the five pieces of the primal splitting and the full
// dual functional
//
//   J*(v*, z*) = -G0*(v0+z0) - G1*(v1+z1) - G2*(v2+z2)
//                - G3*(div v0 - v1 - v2 + f) + F*(-div z0 + z1 + z2).
//
// Every conjugate is an integral of a pointwise density; the densities are
// exposed separately so they can be checked against a brute-force sup.

#include <array>
#include <functional>
#include <string>

#include "glpd/energy.hpp"

namespace glpd {

struct DualPoint {
  VectorField v0;
  ScalarField v1;
  ScalarField v2;
  VectorField z0;
  ScalarField z1;
  ScalarField z2;
  /// The field the point was built from; -div z0 + z1 + z2 = K uhat.
  ScalarField uhat;
};

double g0_star(const Params& p, const VectorField& w);  // 1/(2 gamma) |w|^2
double g1_star(const Params& p, const ScalarField& s);  // 3/(4 alpha^(1/3)) |s|^(4/3)
double g2_star(const Params& p, const ScalarField& s);  // s^2 / (2 (K - beta - eps))
double g3_star(const Params& p, const ScalarField& s);  // s^2 / (2 eps)
double f_star(const Params& p, const ScalarField& s);   // s^2 / (2 K)

/// Completes (z0, z1) to an admissible point by solving for z2, then applies
/// the stationarity relations v0 = -z0 + gamma grad uhat,
/// v1 = -z1 + alpha uhat^3, v2 = -z2 + (K - beta - eps) uhat.
DualPoint reconstruct_dual_point(const Params& p, const ScalarField& uhat, const VectorField& z0,
                                 const ScalarField& z1);

/// z0 = 0, z1 = K uhat, z2 = 0.
DualPoint canonical_dual_point(const Params& p, const ScalarField& uhat);

/// Sup-norm of -div z0 + z1 + z2 - K uhat and the tolerance it is held to.
struct AdmissibilityCheck {
  double residual = 0.0;
  double tolerance = 0.0;
  bool admissible() const { return residual <= tolerance; }
};
AdmissibilityCheck check_admissible(const Params& p, const DualPoint& d);

/// Throws std::invalid_argument for an inadmissible point.
double eval_Jstar(const Params& p, const DualPoint& d);

/// max over t in {t_lo, t_lo + step, ..., t_hi} of s t - integrand(t).
/// Throws std::invalid_argument unless t_lo < t_hi and step > 0.
double scalar_conjugate_oracle(const std::function<double(double)>& integrand, double s, double t_lo, double t_hi,
                               double step);

/// Same sup for a convex integrand without a caller-chosen range: a coarse
/// symmetric window starting at `initial_half_width` doubles until the
/// maximiser is interior, then is refined down to `step`.
double scalar_conjugate_oracle_auto(const std::function<double(double)>& integrand, double s, double step,
                                    double initial_half_width = 10.0);

/// One term of the splitting, reduced to a single node: the primal integrand
/// g(t) and its closed-form conjugate density g*(s).
struct ConjugatePair {
  std::string name;
  double coefficient;
  std::function<double(double)> integrand;
  std::function<double(double)> conjugate;
};

/// G0, G1, G2, G3 and F for the given parameters (G0 is separable per
/// component, so its scalar reduction is gamma t^2 / 2).
std::array<ConjugatePair, 5> conjugate_pairs(const Params& p);

struct FenchelYoungTerm {
  std::string name;
  double conjugate = 0.0;  // g*(s)
  double pairing = 0.0;    // <y, s>
  double primal = 0.0;     // g(y)
  /// g*(s) - <y, s> + g(y); never negative up to roundoff.
  double residual() const { return conjugate - pairing + primal; }
  double scale() const;
};

struct FenchelYoungReport {
  std::array<FenchelYoungTerm, 5> terms;
  double tolerance = 1e-10;

  /// Every term satisfies g*(s) >= <y,s> - g(y) within tolerance * scale.
  bool inequalities_hold() const;
  /// Every term is an equality within tolerance * scale.
  bool equalities_hold() const;
  double max_abs_residual() const;
};

/// Pairs uhat (and grad uhat) with the five conjugate arguments built from d.
/// For a point reconstructed at a critical uhat all five are equalities; for
/// arbitrary d only the inequalities hold.
FenchelYoungReport fenchel_young_check(const Params& p, const ScalarField& uhat, const DualPoint& d,
                                       double tolerance = 1e-10);

}  // namespace glpd
