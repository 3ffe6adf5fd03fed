#include "gmol/operators.hpp"

#include <cmath>
#include <vector>

#include "gmol/errors.hpp"

namespace gmol {

FlowState FlowState::zeros(const DomainGrid& grid) {
  const std::size_t rows = grid.n_lines + 1;
  return {Field(rows, grid.n_theta), Field(rows, grid.n_theta), Field(rows, grid.n_theta)};
}

void FlowState::check_shape(const DomainGrid& grid) const {
  const std::size_t rows = grid.n_lines + 1;
  auto ok = [&](const Field& f) { return f.rows() == rows && f.cols() == grid.n_theta; };
  if (!ok(u) || !ok(v) || (has_pressure() && !ok(P)))
    throw ShapeMismatch("flow state shape does not match the grid");
}

FlowState rotate_state(const FlowState& s, std::size_t k, const DomainGrid& grid) {
  s.check_shape(grid);
  const std::size_t m = grid.n_theta;
  const double delta = grid.dtheta * static_cast<double>(k);
  const double c = std::cos(delta);
  const double sn = std::sin(delta);
  FlowState r = s;
  for (std::size_t n = 0; n < s.u.rows(); ++n) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t to = (j + k) % m;
      r.u(n, to) = c * s.u(n, j) - sn * s.v(n, j);
      r.v(n, to) = sn * s.u(n, j) + c * s.v(n, j);
      if (s.has_pressure()) r.P(n, to) = s.P(n, j);
    }
  }
  return r;
}

LineFunction theta_derivative(std::span<const double> f, int order, double dtheta) {
  LineFunction out(f.size());
  simd::periodic_derivative(f.data(), f.size(), order, dtheta, out.data());
  return out;
}

namespace {

LineFunction hat_d(std::span<const double> f, std::span<const double> prev, std::size_t n,
                   const LineFunction& radial, const LineFunction& angular,
                   const DomainGrid& grid) {
  const LineFunction df = theta_derivative(f, 1, grid.dtheta);
  const double inv_d = 1.0 / grid.d;
  const double inv_t = 1.0 / grid.t[n];
  LineFunction out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = radial[j] * ((f[j] - prev[j]) * inv_d) + angular[j] * inv_t * df[j];
  return out;
}

}  // namespace

LineFunction hat_d1(std::span<const double> u_n, std::span<const double> u_prev, std::size_t n,
                    const GeometryCoefficients& geo, const DomainGrid& grid) {
  return hat_d(u_n, u_prev, n, geo.f5, geo.f6, grid);
}

LineFunction hat_d2(std::span<const double> v_n, std::span<const double> v_prev, std::size_t n,
                    const GeometryCoefficients& geo, const DomainGrid& grid) {
  return hat_d(v_n, v_prev, n, geo.f7, geo.f8, grid);
}

RowDerivatives row_derivatives(std::span<const double> u, std::span<const double> v,
                               std::span<const double> p, double dtheta) {
  RowDerivatives r;
  r.du = theta_derivative(u, 1, dtheta);
  r.d2u = theta_derivative(u, 2, dtheta);
  r.dv = theta_derivative(v, 1, dtheta);
  r.d2v = theta_derivative(v, 2, dtheta);
  if (!p.empty()) {
    r.dp = theta_derivative(p, 1, dtheta);
    r.d2p = theta_derivative(p, 2, dtheta);
  } else {
    r.dp.assign(u.size(), 0.0);
    r.d2p.assign(u.size(), 0.0);
  }
  return r;
}

RowDerivatives row_derivatives(const FlowState& state, std::size_t n, double dtheta) {
  return row_derivatives(state.u.row(n), state.v.row(n),
                         state.has_pressure() ? state.P.row(n) : std::span<const double>{},
                         dtheta);
}

void line_residual(const LineStencil& rows, std::size_t n, const RowDerivatives& cur,
                   const RowDerivatives& prev, const GeometryCoefficients& geo,
                   const DomainGrid& grid, const OperatorOptions& opt, std::span<double> ru,
                   std::span<double> rv, std::span<double> rp) {
  const std::size_t m = grid.n_theta;
  // Stand-in for a missing pressure field.
  static thread_local std::vector<double> zeros;
  if (zeros.size() < m) zeros.assign(m, 0.0);

  simd::LineResidualArgs a;
  a.m = m;
  auto fill = [](simd::FieldLine& fl, const LineRows& f, const LineFunction& dc,
                 const LineFunction& dp, const LineFunction& d2c) {
    fl.next = f.next.data();
    fl.cur = f.cur.data();
    fl.prev = f.prev.data();
    fl.dcur = dc.data();
    fl.dprev = dp.data();
    fl.d2cur = d2c.data();
  };
  fill(a.u, rows.u, cur.du, prev.du, cur.d2u);
  fill(a.v, rows.v, cur.dv, prev.dv, cur.d2v);
  if (!rows.p.cur.empty()) {
    fill(a.p, rows.p, cur.dp, prev.dp, cur.d2p);
  } else {
    const double* z = zeros.data();
    a.p = {z, z, z, z, z, z};
  }
  a.geo = {geo.f2.data(), geo.f3.data(), geo.f4.data(), geo.f5.data(),
           geo.f6.data(), geo.f7.data(), geo.f8.data(), geo.h3.data()};
  a.t = grid.t[n];
  a.d = grid.d;
  a.nu = opt.nu;
  a.epsilon = opt.epsilon;
  a.closure = opt.closure;
  a.convection = opt.convection;
  a.pressure_gradient = opt.pressure_gradient;
  a.ru = ru.data();
  a.rv = rv.data();
  a.rp = rp.data();
  simd::line_residual(a);

  if (opt.scaling == Scaling::physical) {
    for (std::size_t j = 0; j < m; ++j) {
      ru[j] *= geo.h3[j];
      rv[j] *= geo.h3[j];
      rp[j] *= geo.h3[j];
    }
  }
}

void line_residual(const FlowState& state, std::size_t n, const RowDerivatives& cur,
                   const RowDerivatives& prev, const GeometryCoefficients& geo,
                   const DomainGrid& grid, const OperatorOptions& opt, std::span<double> ru,
                   std::span<double> rv, std::span<double> rp) {
  auto rows = [n](const Field& f) { return LineRows{f.row(n + 1), f.row(n), f.row(n - 1)}; };
  LineStencil s{rows(state.u), rows(state.v), {}};
  if (state.has_pressure()) s.p = rows(state.P);
  line_residual(s, n, cur, prev, geo, grid, opt, ru, rv, rp);
}

ResidualFields grid_residual_operators(const FlowState& state, const GeometryCoefficients& geo,
                                       const DomainGrid& grid, const OperatorOptions& opt) {
  state.check_shape(grid);
  const bool needs_pressure = opt.pressure_gradient || opt.closure != Closure::continuity;
  if (needs_pressure && !state.has_pressure())
    throw ModeMismatch("state has no pressure but the selected equations need it");

  const std::size_t interior = grid.n_lines - 1;
  ResidualFields out{Field(interior, grid.n_theta), Field(interior, grid.n_theta),
                     Field(interior, grid.n_theta)};
  RowDerivatives prev = row_derivatives(state, 0, grid.dtheta);
  for (std::size_t n = 1; n < grid.n_lines; ++n) {
    RowDerivatives cur = row_derivatives(state, n, grid.dtheta);
    line_residual(state, n, cur, prev, geo, grid, opt, out.momentum_u.row(n - 1),
                  out.momentum_v.row(n - 1), out.closure.row(n - 1));
    prev = std::move(cur);
  }
  return out;
}

}  // namespace gmol
