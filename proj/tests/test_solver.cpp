#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gmol/errors.hpp"
#include "gmol/residual.hpp"
#include "gmol/solver.hpp"

using namespace gmol;
using doctest::Approx;

namespace {

LineFunction constant(const DomainGrid& g, double c) { return LineFunction(g.n_theta, c); }

// Thomas algorithm for (u_{n+1} - 2u_n + u_{n-1})/d^2 + (f2/t_n)(u_n - u_{n-1})/d = 0,
// u_0 = 1, u_N = 0.
std::vector<double> ladder_oracle(std::size_t N, double f2) {
  const double d = 1.0 / static_cast<double>(N);
  const std::size_t k = N - 1;
  std::vector<double> lo(k), di(k), up(k), rhs(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = 1.0 + static_cast<double>(i + 1) * d;
    const double a = f2 * d / t;
    lo[i] = 1.0 - a;
    di[i] = -2.0 + a;
    up[i] = 1.0;
  }
  rhs[0] = -lo[0] * 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> u(k);
  u[k - 1] = rhs[k - 1] / di[k - 1];
  for (std::size_t i = k - 1; i-- > 0;) u[i] = (rhs[i] - up[i] * u[i + 1]) / di[i];
  return u;
}

BoundaryData unit_step(const DomainGrid& g) {
  return boundary_from_samples(constant(g, 1.0), constant(g, 0.0), constant(g, 0.0),
                               constant(g, 0.0), g);
}

SolverConfig linear_config() {
  SolverConfig c;
  c.convection = false;
  c.pressure_coupling = false;
  return c;
}

}  // namespace

TEST_CASE("t_map_u: zero, constants, and the 2/3 line") {
  const DomainGrid g = DomainGrid::make(10, 32);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const auto z = constant(g, 0.0), a = constant(g, 0.7), one = constant(g, 1.0);

  CHECK(max_abs(t_map_u(z, z, z, z, z, z, 1, geo, g, 1.0)) == 0.0);
  const auto fixed = t_map_u(a, a, a, z, z, z, 3, geo, g, 1.0);
  for (double x : fixed) CHECK(x == Approx(0.7).epsilon(1e-14));
  const auto two_thirds = t_map_u(z, one, one, z, z, z, 1, geo, g, 1.0);
  for (double x : two_thirds) CHECK(x == Approx(2.0 / 3.0).epsilon(1e-14));
  // Same arithmetic for v by symmetry.
  for (double x : t_map_v(z, one, one, z, z, z, 1, geo, g, 1.0))
    CHECK(x == Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("t_map_v against a single-expression evaluation") {
  const DomainGrid g = DomainGrid::make(10, 150);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const auto z = constant(g, 0.0);
  LineFunction s(g.n_theta);
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::sin(g.theta[j]);
  const auto out = t_map_v(z, s, z, z, z, z, 1, geo, g, 1.0);
  const double t = 1.1, d = 0.1;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double th = g.theta[j], sn = std::sin(th), cs = std::cos(th);
    // d2(v_n, 0) = f7 v_n / d + (f8 / t) v_n' with f7 = sin, f8 = cos.
    const double d2v = sn * sn / d + cs * cs / t;
    const double expect = (sn + sn * d / t - sn * d * d / (t * t) - sn * d2v * d * d) / 3.0;
    CHECK(std::abs(out[j] - expect) < 1e-9);
  }
}

TEST_CASE("t_map_P") {
  const DomainGrid g = DomainGrid::make(10, 64);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const auto z = constant(g, 0.0), one = constant(g, 1.0), a = constant(g, 0.4);

  CHECK(max_abs(t_map_P(z, z, z, z, z, z, z, 1, geo, g, Closure::pressure_poisson)) == 0.0);
  CHECK(max_abs(t_map_P(z, z, z, a, a, z, z, 1, geo, g, Closure::pressure_poisson)) < 1e-14);

  const auto p = t_map_P(z, z, z, one, z, z, z, 1, geo, g, Closure::pressure_poisson);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double c = std::cos(g.theta[j]);
    CHECK(p[j] == Approx(c * c / 3.0).epsilon(1e-12));
  }

  // eps L(P) + d1 u + d2 v: P_n = (... + d1(u) d^2 / eps) / 3 = 10 cos * 0.01 / (3 eps).
  const double eps = 0.01;
  const auto q = t_map_P(z, z, z, one, z, z, z, 1, geo, g, Closure::artificial_compressibility, eps);
  for (std::size_t j = 0; j < q.size(); ++j)
    CHECK(q[j] == Approx(10.0 * std::cos(g.theta[j]) * 0.01 / (3.0 * eps)).epsilon(1e-12));

  CHECK_THROWS_AS(t_map_P(z, z, z, z, z, z, z, 1, geo, g, Closure::continuity), ModeMismatch);
}

TEST_CASE("banach_line_solve: homogeneous line") {
  const DomainGrid g = DomainGrid::make(10, 32);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const FlowState s = FlowState::zeros(g);
  const auto r = banach_line_solve(4, s, geo, g, SolverConfig{});
  CHECK(r.iterations == 1);
  CHECK(max_abs(r.u) == 0.0);
  CHECK(max_abs(r.P) == 0.0);
}

TEST_CASE("banach_line_solve: scalar Laplace fixed point and contraction ratio") {
  // u_0 = 1, u_2 = 0, t_1 = 1.1, d = 0.1: u_1 = (1 - 1/11) / (2 - 1/11).
  const DomainGrid g = DomainGrid::make(10, 16);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  FlowState s = FlowState::zeros(g);
  for (std::size_t j = 0; j < g.n_theta; ++j) s.u(0, j) = 1.0;
  SolverConfig c = linear_config();
  c.relaxation = 1.0;
  const auto r = banach_line_solve(1, s, geo, g, c);
  const double expect = (1.0 - 1.0 / 11.0) / (2.0 - 1.0 / 11.0);
  for (double x : r.u) CHECK(x == Approx(expect).epsilon(1e-10));
  CHECK(expect == Approx(0.4762).epsilon(1e-4));

  // The affine map u -> (u + 1 + (u - 1)/11) / 3 has slope (1 + 1/11) / 3.
  // Pressure is driven by u and lags, so read the ratio off u alone.
  auto err = [&](int k) {
    SolverConfig ck = c;
    ck.max_inner = k;
    return std::abs(banach_line_solve(1, s, geo, g, ck, LineSeed::current_row, 1e-300).u[0] - expect);
  };
  for (int k = 2; k < 12; ++k) {
    const double ratio = err(k + 1) / err(k);
    CHECK(ratio <= 0.40);
    CHECK(ratio == Approx((1.0 + 1.0 / 11.0) / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("banach_line_solve seeded from the outer neighbour reaches the same row") {
  const DomainGrid g = DomainGrid::make(10, 16);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  FlowState s = FlowState::zeros(g);
  for (std::size_t j = 0; j < g.n_theta; ++j) s.u(0, j) = 1.0;
  SolverConfig c = linear_config();
  const auto a = banach_line_solve(1, s, geo, g, c, LineSeed::current_row);
  const auto b = banach_line_solve(1, s, geo, g, c, LineSeed::next_row);
  CHECK(max_abs_diff(a.u, b.u) < 1e-10);
}

TEST_CASE("line_relaxation is 1 for coarse theta grids and below 1 for fine ones") {
  const DomainGrid coarse = DomainGrid::make(10, 16);
  CHECK(line_relaxation(1, build_coefficients(BoundaryShape::unit_circle(), coarse), coarse) == 1.0);
  const DomainGrid fine = DomainGrid::make(20, 150);
  const double w = line_relaxation(1, build_coefficients(BoundaryShape::unit_circle(), fine), fine);
  CHECK(w < 1.0);
  CHECK(w > 0.0);
}

TEST_CASE("solve: zero data gives the zero state in one sweep") {
  BoundaryShape shape;
  shape.fourier_cosine = {1.0, 0.2};
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(shape, g);
  const auto res = solve(make_preset("zero", g), geo, g, SolverConfig{});
  CHECK(res.report.sweeps == 1);
  CHECK(res.report.converged);
  CHECK(res.state.u.max_abs() == 0.0);
  CHECK(res.state.P.max_abs() == 0.0);
}

TEST_CASE("solve: linear ladder equals the tridiagonal oracle") {
  const DomainGrid g = DomainGrid::make(10, 16);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  const auto res = solve(unit_step(g), geo, g, linear_config());
  const auto oracle = ladder_oracle(10, 1.0);
  for (std::size_t n = 1; n < 10; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j)
      CHECK(res.state.u(n, j) == Approx(oracle[n - 1]).epsilon(1e-8));
}

TEST_CASE("solve: adding a constant to both boundary rows adds c times the ladder") {
  const DomainGrid g = DomainGrid::make(10, 16);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  LineFunction u0(g.n_theta), v0(g.n_theta, 0.0), z(g.n_theta, 0.0);
  for (std::size_t j = 0; j < g.n_theta; ++j) u0[j] = 0.3 * std::sin(g.theta[j]);
  LineFunction shifted(u0);
  for (double& x : shifted) x += 2.0;
  const SolverConfig c = linear_config();
  const auto a = solve(boundary_from_samples(u0, v0, z, z, g), geo, g, c);
  const auto b = solve(boundary_from_samples(shifted, v0, z, z, g), geo, g, c);
  const auto ladder = ladder_oracle(10, 1.0);
  for (std::size_t n = 1; n < 10; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j)
      CHECK(b.state.u(n, j) - a.state.u(n, j) == Approx(2.0 * ladder[n - 1]).epsilon(1e-7));
}

TEST_CASE("solve: Couette data converges to a fixed point of the sweep") {
  const DomainGrid g = DomainGrid::make(20, 48);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  SolverConfig c;
  c.nu = 0.1;
  const auto res = solve(make_preset("couette", g), geo, g, c);
  REQUIRE(res.report.converged);
  CHECK(res.report.final_change <= c.outer_tol);

  FlowState again = res.state;
  const double change = sweep(again, geo, g, c, c.inner_tol);
  CHECK(change <= 2.0 * c.outer_tol);

  const auto rf = residual_fields(res.state, geo, g, c.nu, c.mode);
  CHECK(rf.momentum_u.max_abs() <= 1e-3);
  CHECK(rf.momentum_v.max_abs() <= 1e-3);
  CHECK(rf.closure.max_abs() <= 1e-3);

  // The velocity is close to the rotational Couette flow.
  double err = 0.0;
  for (std::size_t n = 0; n <= g.n_lines; ++n)
    for (std::size_t j = 0; j < g.n_theta; ++j) {
      const double w = couette::azimuthal_speed(g.t[n]);
      err = std::max(err, std::abs(res.state.u(n, j) + w * std::sin(g.theta[j])));
    }
  CHECK(err < 0.5);
}

TEST_CASE("solve: more inner iterations, other seeds and solvers do not move the fixed point") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  SolverConfig c;
  c.nu = 0.5;
  const auto base = solve(make_preset("couette", g), geo, g, c);

  SolverConfig more = c;
  more.max_inner = 2 * c.max_inner;
  more.adaptive_inner = false;
  const auto b = solve(make_preset("couette", g), geo, g, more);
  CHECK(max_abs_diff(base.state.u, b.state.u) <= 1e-8);

  SolverConfig seeded = c;
  seeded.seed = Seed::outer_neighbor;
  const auto s = solve(make_preset("couette", g), geo, g, seeded);
  CHECK(max_abs_diff(base.state.u, s.state.u) <= 1e-8);

  SolverConfig plain = c;
  plain.anderson_depth = 0;
  const auto p = solve(make_preset("couette", g), geo, g, plain);
  CHECK(max_abs_diff(base.state.u, p.state.u) <= 1e-8);

  SolverConfig lin = c;
  lin.line_solver = LineSolver::linearized;
  const auto l = solve(make_preset("couette", g), geo, g, lin);
  CHECK(max_abs_diff(base.state.u, l.state.u) <= 1e-8);
  CHECK(max_abs_diff(base.state.P, l.state.P) <= 1e-7);
}

TEST_CASE("solve: errors") {
  const DomainGrid g = DomainGrid::make(8, 32);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  CHECK_THROWS_AS(solve(make_preset("example1", g), geo, g, SolverConfig{}), ModeMismatch);

  SolverConfig one;
  one.max_sweeps = 1;
  one.nu = 0.1;
  try {
    solve(make_preset("couette", g), geo, g, one);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.report.sweeps == 1);
    CHECK_FALSE(e.report.converged);
    CHECK_NOTHROW(e.state.check_shape(g));
  }

  SolverConfig bad;
  bad.nu = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = SolverConfig{};
  bad.mode = Closure::artificial_compressibility;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = SolverConfig{};
  bad.outer_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("solve_with_pressure keeps every pressure row") {
  const DomainGrid g = DomainGrid::make(10, 32);
  const auto geo = build_coefficients(BoundaryShape::unit_circle(), g);
  Field P(11, 32);
  for (std::size_t n = 0; n <= 10; ++n)
    for (std::size_t j = 0; j < 32; ++j) P(n, j) = couette::pressure(g.t[n]);
  SolverConfig c;
  c.nu = 0.5;
  const auto r = solve_with_pressure(make_preset("example1", g), P, geo, g, c);
  CHECK(r.report.converged);
  CHECK(max_abs_diff(r.state.P, P) == 0.0);
  const auto rf = residual_fields(r.state, geo, g, c.nu, Closure::continuity);
  CHECK(rf.momentum_u.max_abs() <= 1e-8);
  CHECK(rf.momentum_v.max_abs() <= 1e-8);

  c.line_solver = LineSolver::linearized;
  const auto l = solve_with_pressure(make_preset("example1", g), P, geo, g, c);
  CHECK(max_abs_diff(l.state.u, r.state.u) <= 1e-8);
  CHECK(max_abs_diff(l.state.P, P) == 0.0);

  CHECK_THROWS_AS(solve_with_pressure(make_preset("example1", g), Field(10, 32), geo, g, c),
                  ShapeMismatch);
  c.freeze_pressure = true;
  CHECK_THROWS_AS(solve(make_preset("couette", g), geo, g, c), ValidationError);
}
