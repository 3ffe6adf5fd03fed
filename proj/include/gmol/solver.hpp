#pragma once
// Generalized method of lines: per-line fixed-point maps and the line sweep
// that couples them.
//
// On line n the discrete momentum equation
//   nu [ (u_{n+1} - 2u_n + u_{n-1})/d^2 + (f2/t_n)(u_n - u_{n-1})/d
//        + (f3/t_n) d/dtheta (u_n - u_{n-1})/d + (f4/t_n^2) d2u_n/dtheta2 ]
//   - u_n d1(u_n, u_{n-1}) - v_n d2(u_n, u_{n-1}) - d1(P_n, P_{n-1}) = 0
// is solved for the u_n of the -2u_n term, which gives
//   u_n = u_n + d^2 / (3 nu) * residual_u.
// T2 (v) and T3 (P, pressure-Poisson or artificial compressibility) follow
// the same pattern.

#include <cstddef>
#include <span>
#include <vector>

#include "gmol/boundary.hpp"
#include "gmol/errors.hpp"
#include "gmol/operators.hpp"

namespace gmol {

enum class Seed {
  linear_interpolation,  // interior rows interpolate the boundary rows in t
  outer_neighbor,        // every interior row starts as the outer boundary row
};

enum class LineSeed { current_row, next_row };

enum class LineSolver {
  relaxed_map,  // the pointwise maps above, relaxed by line_relaxation
  linearized,   // Newton on the line residual, neighbours frozen
};

struct SolverConfig {
  double nu = 1.0;
  Closure mode = Closure::pressure_poisson;
  double epsilon = 1e-3;  // artificial_compressibility only
  double inner_tol = 1e-12;
  double outer_tol = 1e-10;
  int max_inner = 200;
  int max_sweeps = 10000;
  Seed seed = Seed::linear_interpolation;
  // Per-sweep inner tolerance max(inner_tol, 1e-2 * previous sweep change).
  bool adaptive_inner = true;
  // Line relaxation weight; <= 0 selects it from the spectrum of the map.
  double relaxation = 0.0;
  bool convection = true;
  bool pressure_coupling = true;
  LineSolver line_solver = LineSolver::relaxed_map;
  // Anderson mixing depth over whole sweeps; 0 gives plain repeated sweeps.
  int anderson_depth = 8;
  // Interior pressure rows are data: the line solvers leave P untouched.
  // Set by solve_with_pressure.
  bool freeze_pressure = false;

  // Throws ValidationError.
  void validate() const;
};

struct SolveReport {
  int sweeps = 0;
  long inner_iterations_total = 0;
  double final_change = 0.0;
  double contraction_ratio_estimate = 0.0;
  double J_final = 0.0;
  double relaxation_min = 1.0;
  bool converged = false;
};

class NoConvergence : public Error {
 public:
  NoConvergence(SolveReport report, FlowState state);
  SolveReport report;
  FlowState state;
};

// Line map for u on line n; pressure coupling and convection on.
LineFunction t_map_u(std::span<const double> u_next, std::span<const double> u_n,
                     std::span<const double> u_prev, std::span<const double> v_n,
                     std::span<const double> P_n, std::span<const double> P_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, double nu);

// Line map for v on line n.
LineFunction t_map_v(std::span<const double> v_next, std::span<const double> v_n,
                     std::span<const double> v_prev, std::span<const double> u_n,
                     std::span<const double> P_n, std::span<const double> P_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, double nu);

// Line map for P: pressure-Poisson closure, or for artificial_compressibility the rearranged
// eps L(P) + d1 u + d2 v = 0 (denominator 3 eps).
LineFunction t_map_P(std::span<const double> P_next, std::span<const double> P_n,
                     std::span<const double> P_prev, std::span<const double> u_n,
                     std::span<const double> u_prev, std::span<const double> v_n,
                     std::span<const double> v_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, Closure mode,
                     double epsilon = 0.0);

// Relaxation weight for line n: 1 when the map's linear part is already a
// contraction with spectrum in (-lmax, lmax], otherwise 2 / (2 - lmin - lmax).
double line_relaxation(std::size_t n, const GeometryCoefficients& geo, const DomainGrid& grid);

struct LineSolveResult {
  LineFunction u, v, P;
  int iterations = 0;
  std::vector<double> changes;  // sup-norm change per iteration
  double relaxation = 1.0;
};

// Fixed-point iteration of the combined map on row n with rows n-1 and n+1
// frozen. Throws InnerDivergence if the change grows 5 times in a row.
LineSolveResult banach_line_solve(std::size_t n, const FlowState& state,
                                  const GeometryCoefficients& geo, const DomainGrid& grid,
                                  const SolverConfig& config,
                                  LineSeed seed = LineSeed::current_row, double tol = -1.0);

// Same contract as banach_line_solve, but each iteration solves the line's
// linearized residual equations exactly (sparse LU of a finite-difference
// Jacobian). Fixed points coincide with those of the pointwise maps.
LineSolveResult linearized_line_solve(std::size_t n, const FlowState& state,
                                      const GeometryCoefficients& geo, const DomainGrid& grid,
                                      const SolverConfig& config, double tol = -1.0);

// Initial state: boundary rows from the data, interior rows from the seed.
FlowState initial_state(const BoundaryData& boundary, const DomainGrid& grid,
                        const SolverConfig& config);

// One ordered sweep n = 1..N-1; returns the sup-change of the state.
double sweep(FlowState& state, const GeometryCoefficients& geo, const DomainGrid& grid,
             const SolverConfig& config, double inner_tol, long* inner_iterations = nullptr);

struct SolveResult {
  FlowState state;
  SolveReport report;
};

// Gauss-Seidel line sweeps until the sweep change is <= outer_tol, with
// optional Anderson mixing of successive sweeps. The returned state is the
// output of the last plain sweep.
// Throws NoConvergence (carrying the last state) after max_sweeps.
SolveResult solve(const BoundaryData& boundary, const GeometryCoefficients& geo,
                  const DomainGrid& grid, const SolverConfig& config);

// Velocity-only solve: every pressure row (0..N) is taken from `pressure` and
// kept fixed. The closure equation is not solved. Throws ShapeMismatch.
SolveResult solve_with_pressure(const BoundaryData& boundary, const Field& pressure,
                                const GeometryCoefficients& geo, const DomainGrid& grid,
                                SolverConfig config);

}  // namespace gmol
