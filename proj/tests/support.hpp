#pragma once

// Seeded generators and finite-difference oracles shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "glpd/energy.hpp"
#include "glpd/mesh.hpp"

namespace glpd::test {

inline ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(g.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return ScalarField(g, v);
}

inline VectorField random_edges(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<Eigen::VectorXd> comps;
  for (int a = 0; a < g.dimension(); ++a) {
    Eigen::VectorXd c(g.edge_count(a));
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = dist(rng);
    comps.push_back(c);
  }
  return VectorField(g, comps);
}

inline ScalarField field_of(const GridSpec& g, std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return ScalarField(g, v);
}

inline ScalarField constant_field(const GridSpec& g, double c) {
  return ScalarField(g, Eigen::VectorXd::Constant(g.size(), c));
}

/// The one-node problem on (0,1) with h = 0.5: -lap is multiplication by 8.
inline Params single_node(double beta, double epsilon = 0.5, std::optional<double> K = 10.0) {
  return Params::make(1.0, 1.0, beta, epsilon, K, ScalarField(GridSpec::line(1)));
}

inline Params zero_source(const GridSpec& g, double beta, double epsilon = 1e-2) {
  return Params::make(1.0, 1.0, beta, epsilon, std::nullopt, ScalarField(g));
}

/// Central difference of F along w at u.
inline double directional_fd(const std::function<double(const ScalarField&)>& F, const ScalarField& u,
                             const ScalarField& w, double t) {
  const ScalarField plus = ScalarField::unchecked(u.grid(), u.values() + t * w.values());
  const ScalarField minus = ScalarField::unchecked(u.grid(), u.values() - t * w.values());
  return (F(plus) - F(minus)) / (2.0 * t);
}

inline Eigen::VectorXd directional_fd_vec(const std::function<ScalarField(const ScalarField&)>& F,
                                          const ScalarField& u, const ScalarField& w, double t) {
  const ScalarField plus = ScalarField::unchecked(u.grid(), u.values() + t * w.values());
  const ScalarField minus = ScalarField::unchecked(u.grid(), u.values() - t * w.values());
  return (F(plus).values() - F(minus).values()) / (2.0 * t);
}

inline bool within_ulps(double a, double b, int ulps) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= ulps * std::numeric_limits<double>::epsilon() * scale;
}

inline double rel_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace glpd::test
