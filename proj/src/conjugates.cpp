#include "glpd/conjugates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glpd {

namespace {

double quadratic_conjugate(double coefficient, const ScalarField& s) { return inner(s, s) / (2.0 * coefficient); }

struct SupResult {
  double value;
  double argmax;
};

SupResult grid_sup(const std::function<double(double)>& integrand, double s, double t_lo, double t_hi,
                   double step) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("conjugate oracle: t_lo must be < t_hi");
  if (!(step > 0.0)) throw std::invalid_argument("conjugate oracle: step must be > 0");
  const auto count = static_cast<long long>(std::floor((t_hi - t_lo) / step));
  SupResult best{s * t_hi - integrand(t_hi), t_hi};
  for (long long k = 0; k <= count; ++k) {
    const double t = t_lo + static_cast<double>(k) * step;
    if (t > t_hi) break;
    const double v = s * t - integrand(t);
    if (v > best.value) best = {v, t};
  }
  return best;
}

}  // namespace

double g0_star(const Params& p, const VectorField& w) {
  require_same_grid(p.grid(), w.grid(), "g0_star");
  return inner_edges(w, w) / (2.0 * p.gamma);
}

double g1_star(const Params& p, const ScalarField& s) {
  require_same_grid(p.grid(), s.grid(), "g1_star");
  const double sum = s.values().array().abs().pow(4.0 / 3.0).sum();
  return 3.0 / (4.0 * std::cbrt(p.alpha)) * sum * s.grid().cell_volume();
}

double g2_star(const Params& p, const ScalarField& s) {
  require_same_grid(p.grid(), s.grid(), "g2_star");
  return quadratic_conjugate(p.g2_coefficient(), s);
}

double g3_star(const Params& p, const ScalarField& s) {
  require_same_grid(p.grid(), s.grid(), "g3_star");
  return quadratic_conjugate(p.epsilon, s);
}

double f_star(const Params& p, const ScalarField& s) {
  require_same_grid(p.grid(), s.grid(), "f_star");
  return quadratic_conjugate(p.K, s);
}

// ---------------------------------------------------------------------------

DualPoint reconstruct_dual_point(const Params& p, const ScalarField& uhat, const VectorField& z0,
                                 const ScalarField& z1) {
  require_same_grid(p.grid(), uhat.grid(), "reconstruct_dual_point");
  require_same_grid(uhat.grid(), z0.grid(), "reconstruct_dual_point");
  require_same_grid(uhat.grid(), z1.grid(), "reconstruct_dual_point");

  ScalarField z2 = p.K * uhat + divergence(z0) - z1;
  VectorField v0 = p.gamma * gradient(uhat) - z0;
  ScalarField v1 = ScalarField::unchecked(uhat.grid(), p.alpha * uhat.values().array().cube().matrix()) - z1;
  ScalarField v2 = p.g2_coefficient() * uhat - z2;
  return DualPoint{std::move(v0), std::move(v1), std::move(v2), z0, z1, std::move(z2), uhat};
}

DualPoint canonical_dual_point(const Params& p, const ScalarField& uhat) {
  return reconstruct_dual_point(p, uhat, VectorField(uhat.grid()), p.K * uhat);
}

AdmissibilityCheck check_admissible(const Params& p, const DualPoint& d) {
  const ScalarField div_z0 = divergence(d.z0);
  const ScalarField lhs = d.z1 + d.z2 - div_z0;
  AdmissibilityCheck check;
  check.residual = (lhs - p.K * d.uhat).max_abs();
  check.tolerance = 1e-12 * std::max(p.K * d.uhat.max_abs(), div_z0.max_abs() + d.z1.max_abs() + d.z2.max_abs());
  return check;
}

double eval_Jstar(const Params& p, const DualPoint& d) {
  require_same_grid(p.grid(), d.uhat.grid(), "eval_Jstar");
  const AdmissibilityCheck check = check_admissible(p, d);
  if (!check.admissible()) {
    throw std::invalid_argument("eval_Jstar: inadmissible dual point (residual " + std::to_string(check.residual) +
                                " > " + std::to_string(check.tolerance) + ")");
  }
  const ScalarField g3_arg = divergence(d.v0) - d.v1 - d.v2 + p.f;
  const ScalarField f_arg = d.z1 + d.z2 - divergence(d.z0);
  return -g0_star(p, d.v0 + d.z0) - g1_star(p, d.v1 + d.z1) - g2_star(p, d.v2 + d.z2) - g3_star(p, g3_arg) +
         f_star(p, f_arg);
}

// ---------------------------------------------------------------------------

double scalar_conjugate_oracle(const std::function<double(double)>& integrand, double s, double t_lo, double t_hi,
                               double step) {
  return grid_sup(integrand, s, t_lo, t_hi, step).value;
}

double scalar_conjugate_oracle_auto(const std::function<double(double)>& integrand, double s, double step,
                                    double initial_half_width) {
  if (!(step > 0.0)) throw std::invalid_argument("conjugate oracle: step must be > 0");
  // s t - g(t) is concave for convex g, so the maximiser stays within one
  // coarse cell of the coarse argmax while the window is refined.
  constexpr int kSamples = 2000;
  double half = initial_half_width;
  double spacing = 2.0 * half / kSamples;
  SupResult best = grid_sup(integrand, s, -half, half, spacing);
  for (int doubling = 0; doubling < 40 && std::abs(best.argmax) >= half - spacing; ++doubling) {
    half *= 2.0;
    spacing = 2.0 * half / kSamples;
    best = grid_sup(integrand, s, -half, half, spacing);
  }
  while (spacing > step) {
    const double lo = best.argmax - spacing;
    const double hi = best.argmax + spacing;
    spacing = std::max(spacing / 100.0, step);
    best = grid_sup(integrand, s, lo, hi, spacing);
  }
  return best.value;
}

std::array<ConjugatePair, 5> conjugate_pairs(const Params& p) {
  auto quadratic = [](std::string name, double c) {
    return ConjugatePair{std::move(name), c, [c](double t) { return 0.5 * c * t * t; },
                         [c](double s) { return s * s / (2.0 * c); }};
  };
  const double alpha = p.alpha;
  ConjugatePair quartic{"G1", alpha, [alpha](double t) { return 0.25 * alpha * t * t * t * t; },
                        [alpha](double s) { return 3.0 / (4.0 * std::cbrt(alpha)) * std::pow(std::abs(s), 4.0 / 3.0); }};
  return {quadratic("G0", p.gamma), std::move(quartic), quadratic("G2", p.g2_coefficient()),
          quadratic("G3", p.epsilon), quadratic("F", p.K)};
}

// ---------------------------------------------------------------------------

double FenchelYoungTerm::scale() const { return 1.0 + std::abs(conjugate) + std::abs(pairing) + std::abs(primal); }

bool FenchelYoungReport::inequalities_hold() const {
  return std::all_of(terms.begin(), terms.end(),
                     [this](const FenchelYoungTerm& t) { return t.residual() >= -tolerance * t.scale(); });
}

bool FenchelYoungReport::equalities_hold() const {
  return std::all_of(terms.begin(), terms.end(),
                     [this](const FenchelYoungTerm& t) { return std::abs(t.residual()) <= tolerance * t.scale(); });
}

double FenchelYoungReport::max_abs_residual() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.residual()));
  return m;
}

FenchelYoungReport fenchel_young_check(const Params& p, const ScalarField& uhat, const DualPoint& d,
                                       double tolerance) {
  require_same_grid(p.grid(), uhat.grid(), "fenchel_young_check");
  const VectorField grad_u = gradient(uhat);

  const VectorField s0 = d.v0 + d.z0;
  const ScalarField s1 = d.v1 + d.z1;
  const ScalarField s2 = d.v2 + d.z2;
  const ScalarField s3 = divergence(d.v0) - d.v1 - d.v2 + p.f;
  const ScalarField sf = d.z1 + d.z2 - divergence(d.z0);

  FenchelYoungReport report;
  report.tolerance = tolerance;
  report.terms = {
      FenchelYoungTerm{"G0", g0_star(p, s0), inner_edges(grad_u, s0), g0_primal(p, grad_u)},
      FenchelYoungTerm{"G1", g1_star(p, s1), inner(uhat, s1), g1_primal(p, uhat)},
      FenchelYoungTerm{"G2", g2_star(p, s2), inner(uhat, s2), g2_primal(p, uhat)},
      FenchelYoungTerm{"G3", g3_star(p, s3), inner(uhat, s3), g3_primal(p, uhat)},
      FenchelYoungTerm{"F", f_star(p, sf), inner(uhat, sf), f_primal(p, uhat)},
  };
  return report;
}

}  // namespace glpd
