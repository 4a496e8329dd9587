#include <doctest.h>

#include "glpd/conjugates.hpp"
#include "glpd/solve.hpp"
#include "support.hpp"

using namespace glpd;
using test::field_of;
using test::single_node;

namespace {

const GridSpec kOne = GridSpec::line(1);

VectorField edges_of(const GridSpec& g, std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return VectorField(g, {v});
}

// Exact critical point of a 1D n=7 problem with a source chosen so that the
// sine bump solves it.
struct Manufactured {
  Params p;
  ScalarField u;
};

Manufactured manufactured(const GridSpec& g, double eps = 0.1) {
  const ScalarField u = 0.7 * sine_bump(g);
  const Params base = Params::make(1.0, 1.0, 3.0, eps, std::nullopt, ScalarField(g));
  const ScalarField f = grad_primal(base, u);
  return {Params::make(1.0, 1.0, 3.0, eps, std::nullopt, f), u};
}

}  // namespace

TEST_CASE("closed-form conjugates on one node") {
  const Params p = single_node(9.0);
  CHECK(g0_star(p, edges_of(kOne, {2.0, -2.0})) == 2.0);
  CHECK(g0_star(p, VectorField(kOne)) == 0.0);
  CHECK(g1_star(p, field_of(kOne, {1.0})) == 0.375);
  CHECK(g1_star(p, ScalarField(kOne)) == 0.0);
  CHECK(g3_star(p, field_of(kOne, {0.5})) == 0.125);
  CHECK(g3_star(p, ScalarField(kOne)) == 0.0);
  CHECK(f_star(p, field_of(kOne, {10.0})) == 2.5);
  CHECK(f_star(p, ScalarField(kOne)) == 0.0);
  // K - beta - eps = 0.5
  const Params q = Params::make(1.0, 1.0, 9.0, 0.5, 10.0, ScalarField(kOne));
  CHECK(q.g2_coefficient() == 0.5);
  CHECK(g2_star(q, field_of(kOne, {0.5})) == 0.125);
  CHECK(g2_star(q, ScalarField(kOne)) == 0.0);
}

TEST_CASE("G0 conjugate attains its sup at w / gamma") {
  std::mt19937_64 rng(31);
  const GridSpec g({3, 4});
  const Params p = Params::make(2.5, 1.0, 1.0, 0.1, std::nullopt, ScalarField(g));
  for (int k = 0; k < 10; ++k) {
    const VectorField w = test::random_edges(g, rng, -5.0, 5.0);
    const VectorField v = (1.0 / p.gamma) * w;
    const double sup = inner_edges(v, w) - 0.5 * p.gamma * inner_edges(v, v);
    CHECK(std::abs(g0_star(p, w) - sup) <= 1e-9 * std::abs(sup));
    // any other v does no better
    const VectorField other = v + 0.1 * test::random_edges(g, rng);
    CHECK(inner_edges(other, w) - 0.5 * p.gamma * inner_edges(other, other) <= sup);
  }
}

TEST_CASE("scalar conjugate oracle examples") {
  const auto quartic = [](double t) { return 0.25 * t * t * t * t; };
  CHECK(std::abs(scalar_conjugate_oracle(quartic, 1.0, -3.0, 3.0, 1e-4) - 0.75) <= 1e-6);
  const auto quad = [](double c) { return [c](double t) { return 0.5 * c * t * t; }; };
  CHECK(scalar_conjugate_oracle(quad(4.0), 0.0, -10.0, 10.0, 1e-3) == 0.0);
  CHECK(std::abs(scalar_conjugate_oracle(quad(1.0), 3.0, -10.0, 10.0, 1e-4) - 4.5) <= 1e-6);
  CHECK_THROWS_AS(scalar_conjugate_oracle(quartic, 1.0, 1.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(scalar_conjugate_oracle(quartic, 1.0, -1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scalar_conjugate_oracle_auto(quartic, 1.0, -1.0), std::invalid_argument);
  // The sup lies on the range edge when the range is too small.
  CHECK(scalar_conjugate_oracle(quad(1.0), 3.0, -1.0, 1.0, 0.3) == doctest::Approx(2.5));
}

TEST_CASE("closed forms match the brute-force sup") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> s_dist(-10.0, 10.0);
  for (double eps : {0.5, 0.01}) {
    const Params p = Params::make(0.7, 1.3, 2.0, eps, std::nullopt, ScalarField(kOne));
    for (const ConjugatePair& pair : conjugate_pairs(p)) {
      for (int k = 0; k < 10; ++k) {
        const double s = s_dist(rng);
        const double oracle = scalar_conjugate_oracle_auto(pair.integrand, s, 1e-4);
        const double tol = pair.name == "G1" ? 1e-6 : 1e-8 * std::max(1.0, std::abs(oracle));
        CHECK_MESSAGE(std::abs(pair.conjugate(s) - oracle) <= tol, pair.name << " s=" << s);
      }
    }
  }
  // quadratic conjugates against a fixed range, matching the hand formula
  const Params p = single_node(9.0);
  for (const ConjugatePair& pair : conjugate_pairs(p)) {
    if (pair.name == "G1") continue;
    const double s = 1.7;
    const double t_star = s / pair.coefficient;
    const double oracle = scalar_conjugate_oracle(pair.integrand, s, t_star - 1.0, t_star + 1.0, 1e-5);
    CHECK(std::abs(pair.conjugate(s) - oracle) <= 1e-8);
  }
}

TEST_CASE("conjugates are convex") {
  std::mt19937_64 rng(33);
  const GridSpec g({4, 3});
  const Params p = Params::make(1.2, 0.8, 2.0, 0.2, std::nullopt, ScalarField(g));
  using Scalar = double (*)(const Params&, const ScalarField&);
  for (Scalar fn : {Scalar(g1_star), Scalar(g2_star), Scalar(g3_star), Scalar(f_star)}) {
    for (int k = 0; k < 20; ++k) {
      const ScalarField a = test::random_field(g, rng, -10, 10);
      const ScalarField b = test::random_field(g, rng, -10, 10);
      const ScalarField mid = 0.5 * (a + b);
      CHECK(fn(p, mid) <= 0.5 * (fn(p, a) + fn(p, b)) * (1.0 + 1e-14));
    }
  }
  for (int k = 0; k < 20; ++k) {
    const VectorField a = test::random_edges(g, rng, -10, 10);
    const VectorField b = test::random_edges(g, rng, -10, 10);
    CHECK(g0_star(p, 0.5 * (a + b)) <= 0.5 * (g0_star(p, a) + g0_star(p, b)) * (1.0 + 1e-14));
  }
}

TEST_CASE("reconstruction on one node") {
  const Params p = single_node(9.0);
  const ScalarField u = field_of(kOne, {1.0});
  const DualPoint d = reconstruct_dual_point(p, u, VectorField(kOne), field_of(kOne, {10.0}));
  CHECK(d.v0.component(0) == Eigen::Vector2d(2.0, -2.0));
  CHECK(d.v1[0] == -9.0);
  CHECK(d.v2[0] == 0.5);
  CHECK(d.z2[0] == 0.0);
  CHECK(check_admissible(p, d).admissible());
  CHECK(eval_Jstar(p, d) == -0.125);
  const DualPoint c = canonical_dual_point(p, u);
  CHECK(c.z1[0] == 10.0);
  CHECK(c.z2[0] == 0.0);
  CHECK(c.z0.max_abs() == 0.0);

  const Params q = Params::make(1.0, 1.0, 2.0, 0.1, std::nullopt, field_of(kOne, {3.0}));
  const DualPoint z = reconstruct_dual_point(q, ScalarField(kOne), VectorField(kOne), ScalarField(kOne));
  CHECK(z.v0.max_abs() == 0.0);
  CHECK(z.v1.max_abs() == 0.0);
  CHECK(z.v2.max_abs() == 0.0);
  CHECK(z.z2.max_abs() == 0.0);
  const Params zero = single_node(9.0);
  CHECK(eval_Jstar(zero, reconstruct_dual_point(zero, ScalarField(kOne), VectorField(kOne), ScalarField(kOne))) ==
        0.0);
}

TEST_CASE("reconstruction identities") {
  std::mt19937_64 rng(34);
  const GridSpec g = GridSpec::line(7);
  const Manufactured m = manufactured(g);
  REQUIRE(grad_primal(m.p, m.u).max_abs() <= 1e-12);
  for (int k = 0; k < 20; ++k) {
    const VectorField z0 = test::random_edges(g, rng, -5, 5);
    const ScalarField z1 = test::random_field(g, rng, -5, 5);
    const DualPoint d = reconstruct_dual_point(m.p, m.u, z0, z1);
    const ScalarField lhs = divergence(d.v0) - d.v1 - d.v2;
    const double scale = divergence(d.v0).max_abs() + d.v1.max_abs() + d.v2.max_abs() + m.p.f.max_abs();
    // at a critical point the G3 argument collapses to eps u
    CHECK((lhs - m.p.epsilon * m.u + m.p.f).max_abs() <= 1e-10 * scale);
  }
  // away from critical points the identity carries the shifted residual
  const GridSpec g2({3, 4});
  const Params p = Params::make(1.0, 1.0, 2.0, 0.2, std::nullopt, test::random_field(g2, rng));
  for (int k = 0; k < 10; ++k) {
    const ScalarField u = test::random_field(g2, rng);
    const DualPoint d = reconstruct_dual_point(p, u, test::random_edges(g2, rng), test::random_field(g2, rng));
    const ScalarField lhs = divergence(d.v0) - d.v1 - d.v2;
    const ScalarField want = -residual_shifted(p, u) - p.f;
    CHECK((lhs - want).max_abs() <= 1e-10 * (1.0 + want.max_abs() + divergence(d.v0).max_abs()));
    CHECK(check_admissible(p, d).admissible());
  }
}

TEST_CASE("full dual is independent of the z choice") {
  std::mt19937_64 rng(35);
  for (const auto& n : std::vector<std::vector<int>>{{1}, {7}, {3, 3}}) {
    const GridSpec g(n);
    const Params p = Params::make(1.3, 0.9, 4.0, 0.05, std::nullopt, test::random_field(g, rng));
    const ScalarField u = test::random_field(g, rng);
    const double want = eval_dual(p, u);
    for (int k = 0; k < 20; ++k) {
      const DualPoint d =
          reconstruct_dual_point(p, u, test::random_edges(g, rng, -3, 3), test::random_field(g, rng, -3, 3));
      CHECK(std::abs(eval_Jstar(p, d) - want) <= 1e-9 * std::abs(want));
    }
    CHECK(std::abs(eval_Jstar(p, canonical_dual_point(p, u)) - want) <= 1e-9 * std::abs(want));
  }
}

TEST_CASE("inadmissible points are rejected") {
  const Params p = single_node(9.0);
  DualPoint d = canonical_dual_point(p, field_of(kOne, {1.0}));
  d.z2[0] += 1e-3;
  CHECK_FALSE(check_admissible(p, d).admissible());
  CHECK_THROWS_AS(eval_Jstar(p, d), std::invalid_argument);
}

TEST_CASE("Fenchel-Young equalities on reconstructed points") {
  const Params p = single_node(9.0);
  const ScalarField u = field_of(kOne, {1.0});
  const FenchelYoungReport r =
      fenchel_young_check(p, u, reconstruct_dual_point(p, u, VectorField(kOne), field_of(kOne, {10.0})));
  CHECK(r.equalities_hold());
  CHECK(r.max_abs_residual() <= 1e-12);

  const ScalarField zero(kOne);
  const FenchelYoungReport z = fenchel_young_check(p, zero, canonical_dual_point(p, zero));
  for (const auto& t : z.terms) {
    CHECK(t.conjugate == 0.0);
    CHECK(t.pairing == 0.0);
    CHECK(t.primal == 0.0);
  }

  std::mt19937_64 rng(36);
  const GridSpec g = GridSpec::line(7);
  const Manufactured m = manufactured(g);
  for (int k = 0; k < 10; ++k) {
    const DualPoint d =
        reconstruct_dual_point(m.p, m.u, test::random_edges(g, rng, -4, 4), test::random_field(g, rng, -4, 4));
    CHECK(fenchel_young_check(m.p, m.u, d).equalities_hold());
  }
}

TEST_CASE("Fenchel-Young inequalities on perturbed points") {
  std::mt19937_64 rng(37);
  const GridSpec g = GridSpec::line(7);
  const Manufactured m = manufactured(g);
  int strict = 0;
  for (int k = 0; k < 50; ++k) {
    DualPoint d = reconstruct_dual_point(m.p, m.u, test::random_edges(g, rng), test::random_field(g, rng));
    d.v0 += test::random_edges(g, rng);
    d.v1 += test::random_field(g, rng);
    d.v2 += test::random_field(g, rng);
    d.z1 += test::random_field(g, rng);
    const FenchelYoungReport r = fenchel_young_check(m.p, m.u, d);
    CHECK(r.inequalities_hold());
    if (!r.equalities_hold()) ++strict;
  }
  CHECK(strict == 50);
}

TEST_CASE("Fenchel-Young inequality for random pairs") {
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  const Params p = Params::make(0.6, 1.7, 3.0, 0.3, std::nullopt, ScalarField(kOne));
  for (const ConjugatePair& pair : conjugate_pairs(p)) {
    for (int k = 0; k < 100; ++k) {
      const double y = dist(rng);
      const double s = dist(rng);
      CHECK(pair.conjugate(s) >= y * s - pair.integrand(y) - 1e-12 * (1.0 + std::abs(y * s)));
    }
    // equality at the optimal pairing s = g'(y)
    const double y = 1.3;
    const double s = pair.name == "G1" ? p.alpha * y * y * y : pair.coefficient * y;
    CHECK(std::abs(pair.conjugate(s) - (y * s - pair.integrand(y))) <= 1e-10 * (1.0 + std::abs(y * s)));
  }
}
