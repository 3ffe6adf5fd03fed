#include <cmath>

#include "doctest.h"
#include "gmol/boundary.hpp"
#include "gmol/errors.hpp"
#include "gmol/residual.hpp"

using namespace gmol;
using doctest::Approx;

namespace {

FlowState rigid_rotation(const DomainGrid& g, const GeometryCoefficients& geo, double w) {
  FlowState s = FlowState::zeros(g);
  for (std::size_t n = 0; n <= g.n_lines; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j) {
      const double rad = g.t[n] * geo.r[j];
      s.u(n, j) = -w * rad * std::sin(g.theta[j]);
      s.v(n, j) = w * rad * std::cos(g.theta[j]);
      s.P(n, j) = 0.5 * w * w * rad * rad;
    }
  return s;
}

FlowState couette_state(const DomainGrid& g) {
  FlowState s = FlowState::zeros(g);
  for (std::size_t n = 0; n <= g.n_lines; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j) {
      const double w = couette::azimuthal_speed(g.t[n]);
      s.u(n, j) = -w * std::sin(g.theta[j]);
      s.v(n, j) = w * std::cos(g.theta[j]);
      s.P(n, j) = couette::pressure(g.t[n]);
    }
  return s;
}

// Smooth but not a solution, so every residual is nonzero.
FlowState wobbly(const DomainGrid& g) {
  FlowState s = FlowState::zeros(g);
  for (std::size_t n = 0; n <= g.n_lines; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j) {
      const double t = g.t[n], th = g.theta[j];
      s.u(n, j) = std::sin(th) * (2.0 - t) + 0.3 * std::cos(2 * th) * t;
      s.v(n, j) = std::cos(3 * th) * (t - 1.0) - 0.2 * t * t;
      s.P(n, j) = std::sin(th + t) + 0.1 * std::cos(th) * t;
    }
  return s;
}

BoundaryShape lumpy() {
  BoundaryShape s;
  s.fourier_cosine = {1.0, 0.1, 0.04};
  s.fourier_sine = {0.0, 0.0, 0.0, 0.03};
  return s;
}

}  // namespace

TEST_CASE("J of the zero state is zero") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(lumpy(), g);
  const auto r = evaluate_J(FlowState::zeros(g), geo, g, 0.1);
  CHECK(r.J == 0.0);
  CHECK(r.quadrature == Quadrature::unit_weighted);
  CHECK(r.scaling == Scaling::transformed);
}

TEST_CASE("J is the sum of its parts and needs pressure") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(lumpy(), g);
  const auto r = evaluate_J(wobbly(g), geo, g, 0.3);
  CHECK(r.J == Approx(r.momentum_u_norm2 + r.momentum_v_norm2 + r.continuity_norm2).epsilon(1e-15));
  CHECK(r.J > 0.0);

  // Third term is plain continuity: check against the operator directly.
  OperatorOptions opt;
  opt.nu = 0.3;
  opt.closure = Closure::continuity;
  const auto f = grid_residual_operators(wobbly(g), geo, g, opt);
  double c2 = 0.0;
  for (double x : f.closure.values()) c2 += x * x;
  CHECK(r.continuity_norm2 == Approx(c2).epsilon(1e-14));

  FlowState no_p = wobbly(g);
  no_p.P = Field();
  CHECK_THROWS_AS(evaluate_J(no_p, geo, g, 0.3), IncompleteState);
  CHECK_THROWS_AS(residual_fields(no_p, geo, g, 0.3, Closure::pressure_poisson), IncompleteState);
}

TEST_CASE("cell-area quadrature weights") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(lumpy(), g);
  const double w = quadrature_weight(Quadrature::cell_area_weighted, 3, 5, geo, g);
  CHECK(w == Approx(g.t[3] * g.d * g.dtheta * geo.r[5] * geo.r[5]).epsilon(1e-15));
  CHECK(quadrature_weight(Quadrature::unit_weighted, 3, 5, geo, g) == 1.0);
}

TEST_CASE("exact solutions: J is discretization error only") {
  // The backward radial difference leaves an O(d) residual at every node, so
  // area-weighted J falls like d^2.
  auto J = [](std::size_t n, bool couette) {
    const DomainGrid g = DomainGrid::make(n, 150);
    const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
    const FlowState s = couette ? couette_state(g) : rigid_rotation(g, geo, 1.0);
    return evaluate_J(s, geo, g, 0.1, Quadrature::cell_area_weighted);
  };
  for (bool couette : {false, true}) {
    const auto a = J(20, couette), b = J(40, couette);
    CHECK(a.J / b.J >= 3.5);
    CHECK(a.continuity_norm2 < 1e-20);
  }
  CHECK(J(20, false).J < 1e-2);
  CHECK(J(20, true).J < 1e-1);
}

TEST_CASE("rigid rotation: J floor scales like w^4") {
  const DomainGrid g = DomainGrid::make(20, 150);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const double j1 = evaluate_J(rigid_rotation(g, geo, 1.0), geo, g, 0.1).J;
  for (double w : {0.5, 2.0}) {
    const double ratio = evaluate_J(rigid_rotation(g, geo, w), geo, g, 0.1).J / j1;
    const double expect = std::pow(w, 4);
    CHECK(ratio >= expect / 2.0);
    CHECK(ratio <= expect * 2.0);
  }
}

TEST_CASE("rigid rotation: pressure-Poisson residual is small and shrinks") {
  auto sup = [](std::size_t n) {
    const DomainGrid g = DomainGrid::make(n, 150);
    const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
    return residual_fields(rigid_rotation(g, geo, 1.0), geo, g, 0.1, Closure::pressure_poisson)
        .closure.max_abs();
  };
  const double a = sup(20), b = sup(40);
  CHECK(a <= 0.5 * (0.05 + std::pow(2 * 3.141592653589793 / 150, 2)));
  CHECK(a / b >= 1.8);
}

TEST_CASE("J is invariant under rigid rotation of shape and state") {
  const DomainGrid g = DomainGrid::make(12, 60);
  const auto geo = build_coefficients(lumpy(), g);
  const FlowState s = wobbly(g);
  for (auto q : {Quadrature::unit_weighted, Quadrature::cell_area_weighted}) {
    const double base = evaluate_J(s, geo, g, 0.2, q).J;
    for (std::size_t k : {1u, 7u, 31u}) {
      const auto geo_k = build_coefficients(lumpy().rotated(g.dtheta * static_cast<double>(k)), g);
      const double turned = evaluate_J(rotate_state(s, k, g), geo_k, g, 0.2, q).J;
      CHECK(std::abs(turned - base) <= 1e-12 * base);
    }
  }
}

TEST_CASE("J vanishes exactly when every residual does") {
  const DomainGrid g = DomainGrid::make(6, 24);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  // Constant velocity and pressure: every difference is zero.
  FlowState s = FlowState::zeros(g);
  for (double& x : s.u.values()) x = 0.4;
  for (double& x : s.P.values()) x = -1.0;
  CHECK(evaluate_J(s, geo, g, 1.0).J < 1e-24);  // stencil roundoff only
  s.u(3, 4) += 1e-3;
  CHECK(evaluate_J(s, geo, g, 1.0).J > 0.0);
}

TEST_CASE("physical scaling multiplies each residual by h3") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(lumpy(), g);
  OperatorOptions t, p;
  t.nu = p.nu = 0.2;
  p.scaling = Scaling::physical;
  const auto a = grid_residual_operators(wobbly(g), geo, g, t);
  const auto b = grid_residual_operators(wobbly(g), geo, g, p);
  for (std::size_t r = 0; r < a.momentum_u.rows(); ++r)
    for (std::size_t j = 0; j < g.n_theta; ++j)
      CHECK(b.momentum_u(r, j) == Approx(a.momentum_u(r, j) * geo.h3[j]).epsilon(1e-13));
}
