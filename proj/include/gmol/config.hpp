#pragma once
// Run configuration: flat "key = value" text, '#' starts a comment.
//
//   shape.cos = 1, 0.1        # r = c0 + c1 cos + ...
//   shape.sin = 0, 0.05
//   N = 20
//   M = 150
//   nu = 0.1
//   mode = pressure_poisson   # | artificial_compressibility
//   boundary = couette        # preset name or CSV path (theta,u0,v0[,P0,Pf])
//   outputs = out

#include <string>
#include <string_view>

#include "gmol/ansatz.hpp"
#include "gmol/geometry.hpp"
#include "gmol/potential.hpp"
#include "gmol/residual.hpp"
#include "gmol/solver.hpp"

namespace gmol {

struct TheoremCase {
  std::string w1 = "xy";
  std::string forcing = "zero";
  std::size_t n = 128;
  double nu = 1.0;
};

struct RunConfig {
  BoundaryShape shape;
  std::size_t N = 20;
  std::size_t M = 150;
  double nu = 0.1;
  Closure mode = Closure::pressure_poisson;
  double epsilon = 1e-3;
  std::string boundary = "example1";
  Seed seed = Seed::linear_interpolation;
  double inner_tol = 1e-12;
  double outer_tol = 1e-10;
  int max_inner = 200;
  int max_sweeps = 10000;
  double relaxation = 0.0;
  LineSolver line_solver = LineSolver::relaxed_map;
  int anderson_depth = 8;
  FitOptions fit;
  Quadrature quadrature = Quadrature::unit_weighted;
  std::string outputs = "out";
  TheoremCase theorem;

  SolverConfig solver_config() const;
  DomainGrid grid() const;
};

// Throws ParseError(line) for malformed lines, unknown or repeated keys, and
// ValidationError(field) for values out of range.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

std::string_view to_string(Closure c);
std::string_view to_string(Seed s);
std::string_view to_string(LineSolver s);

}  // namespace gmol
