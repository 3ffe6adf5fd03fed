#pragma once
// Discrete calculus on the (t, theta) grid.
//
// Radial second derivatives are central, radial first derivatives use the
// backward difference (f_n - f_{n-1}) / d, theta derivatives use periodic
// 6th-order central stencils. The same line kernel backs the solver maps and
// the residual evaluator, so a converged solver state has a near-zero
// discrete residual.

#include <cstddef>
#include <span>

#include "gmol/field.hpp"
#include "gmol/geometry.hpp"
#include "gmol/simd/kernels.hpp"

namespace gmol {

using simd::Closure;

// u, v, P on all lines; row n is line t_n (rows 0 and N are boundaries).
// P may be empty (no pressure).
struct FlowState {
  Field u, v, P;

  static FlowState zeros(const DomainGrid& grid);
  bool has_pressure() const { return !P.empty(); }
  // Throws ShapeMismatch if u, v (and P when present) are not (N+1) x M.
  void check_shape(const DomainGrid& grid) const;
};

// Rigid rotation by k theta-nodes: every row shifted by k and (u, v) turned
// by the same angle. Pairs with BoundaryShape::rotated and rotate_boundary.
FlowState rotate_state(const FlowState& s, std::size_t k, const DomainGrid& grid);

LineFunction theta_derivative(std::span<const double> f, int order, double dtheta);

// f5 (u_n - u_prev)/d + (f6/t_n) du_n/dtheta.
LineFunction hat_d1(std::span<const double> u_n, std::span<const double> u_prev, std::size_t n,
                    const GeometryCoefficients& geo, const DomainGrid& grid);
// f7 (v_n - v_prev)/d + (f8/t_n) dv_n/dtheta.
LineFunction hat_d2(std::span<const double> v_n, std::span<const double> v_prev, std::size_t n,
                    const GeometryCoefficients& geo, const DomainGrid& grid);

enum class Scaling {
  transformed,  // equations multiplied by r^2 / f0
  physical,     // transformed residual times h3 = f0 / r^2
};

struct OperatorOptions {
  double nu = 1.0;
  Closure closure = Closure::pressure_poisson;
  double epsilon = 0.0;
  Scaling scaling = Scaling::transformed;
  bool convection = true;
  bool pressure_gradient = true;
};

// Interior residuals, row n-1 holds line n (n = 1..N-1).
struct ResidualFields {
  Field momentum_u, momentum_v, closure;
};

// theta-derivatives of one row of each field.
struct RowDerivatives {
  LineFunction du, d2u, dv, d2v, dp, d2p;
};

RowDerivatives row_derivatives(const FlowState& state, std::size_t n, double dtheta);
RowDerivatives row_derivatives(std::span<const double> u, std::span<const double> v,
                               std::span<const double> p, double dtheta);

// Rows n+1, n, n-1 of one field.
struct LineRows {
  std::span<const double> next, cur, prev;
};

struct LineStencil {
  LineRows u, v, p;
};

// Residuals on line n from explicit rows; same contract as below.
void line_residual(const LineStencil& rows, std::size_t n, const RowDerivatives& cur,
                   const RowDerivatives& prev, const GeometryCoefficients& geo,
                   const DomainGrid& grid, const OperatorOptions& opt, std::span<double> ru,
                   std::span<double> rv, std::span<double> rp);

// Transformed-scaling residuals on line n (1 <= n <= N-1). cur and prev are
// the derivatives of rows n and n-1. A state without pressure is treated as
// P = 0 (only valid with continuity closure and no pressure gradient).
void line_residual(const FlowState& state, std::size_t n, const RowDerivatives& cur,
                   const RowDerivatives& prev, const GeometryCoefficients& geo,
                   const DomainGrid& grid, const OperatorOptions& opt, std::span<double> ru,
                   std::span<double> rv, std::span<double> rp);

// Throws ModeMismatch if the state lacks pressure and the options need it.
ResidualFields grid_residual_operators(const FlowState& state, const GeometryCoefficients& geo,
                                       const DomainGrid& grid, const OperatorOptions& opt);

}  // namespace gmol
