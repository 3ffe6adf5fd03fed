#pragma once
// The residual functional J: squared momentum residuals plus squared
// continuity residual, summed over interior nodes.

#include <string_view>

#include "gmol/operators.hpp"

namespace gmol {

enum class Quadrature {
  unit_weighted,       // every interior node has weight 1
  cell_area_weighted,  // t_n d dtheta r(theta_j)^2
};

std::string_view to_string(Quadrature q);
std::string_view to_string(Scaling s);

struct ResidualReport {
  double J = 0.0;
  double momentum_u_norm2 = 0.0;
  double momentum_v_norm2 = 0.0;
  double continuity_norm2 = 0.0;
  Quadrature quadrature = Quadrature::unit_weighted;
  Scaling scaling = Scaling::transformed;
};

// Node weight of interior line n (1..N-1) at theta node j.
double quadrature_weight(Quadrature q, std::size_t n, std::size_t j,
                         const GeometryCoefficients& geo, const DomainGrid& grid);

// The third term uses plain continuity regardless of how the state was
// produced. Throws IncompleteState if the state has no pressure.
ResidualReport evaluate_J(const FlowState& state, const GeometryCoefficients& geo,
                          const DomainGrid& grid, double nu,
                          Quadrature quadrature = Quadrature::unit_weighted,
                          Scaling scaling = Scaling::transformed);

// Momentum residuals plus the closure equation of the given mode, transformed
// scaling. Throws IncompleteState.
ResidualFields residual_fields(const FlowState& state, const GeometryCoefficients& geo,
                               const DomainGrid& grid, double nu, Closure mode,
                               double epsilon = 0.0);

}  // namespace gmol
