#include "gmol/residual.hpp"

#include "gmol/errors.hpp"

namespace gmol {

std::string_view to_string(Quadrature q) {
  return q == Quadrature::unit_weighted ? "unit_weighted" : "cell_area_weighted";
}

std::string_view to_string(Scaling s) {
  return s == Scaling::transformed ? "transformed" : "physical";
}

double quadrature_weight(Quadrature q, std::size_t n, std::size_t j,
                         const GeometryCoefficients& geo, const DomainGrid& grid) {
  if (q == Quadrature::unit_weighted) return 1.0;
  return grid.t[n] * grid.d * grid.dtheta * geo.r[j] * geo.r[j];
}

ResidualReport evaluate_J(const FlowState& state, const GeometryCoefficients& geo,
                          const DomainGrid& grid, double nu, Quadrature quadrature,
                          Scaling scaling) {
  if (!state.has_pressure()) throw IncompleteState("J needs pressure on every line");
  state.check_shape(grid);
  OperatorOptions opt;
  opt.nu = nu;
  opt.closure = Closure::continuity;
  opt.scaling = scaling;
  const ResidualFields f = grid_residual_operators(state, geo, grid, opt);

  ResidualReport rep;
  rep.quadrature = quadrature;
  rep.scaling = scaling;
  for (std::size_t n = 1; n < grid.n_lines; ++n) {
    for (std::size_t j = 0; j < grid.n_theta; ++j) {
      const double w = quadrature_weight(quadrature, n, j, geo, grid);
      const double a = f.momentum_u(n - 1, j);
      const double b = f.momentum_v(n - 1, j);
      const double c = f.closure(n - 1, j);
      rep.momentum_u_norm2 += w * a * a;
      rep.momentum_v_norm2 += w * b * b;
      rep.continuity_norm2 += w * c * c;
    }
  }
  rep.J = rep.momentum_u_norm2 + rep.momentum_v_norm2 + rep.continuity_norm2;
  return rep;
}

ResidualFields residual_fields(const FlowState& state, const GeometryCoefficients& geo,
                               const DomainGrid& grid, double nu, Closure mode, double epsilon) {
  if (!state.has_pressure()) throw IncompleteState("residual fields need pressure");
  OperatorOptions opt;
  opt.nu = nu;
  opt.closure = mode;
  opt.epsilon = epsilon;
  return grid_residual_operators(state, geo, grid, opt);
}

}  // namespace gmol
