#pragma once

#include <string_view>

#include "gmol/field.hpp"
#include "gmol/geometry.hpp"

namespace gmol {

// Inner-boundary traces u0, v0 (with theta-derivatives) and optional pressure
// traces on both boundaries. The outer velocity is zero.
struct BoundaryData {
  enum class Provenance { analytic, file };

  LineFunction u0, du0, d2u0;
  LineFunction v0, dv0, d2v0;
  LineFunction P0;  // empty when no inner pressure condition
  LineFunction Pf;  // empty when no outer pressure condition
  Provenance provenance = Provenance::analytic;

  bool has_pressure() const { return !P0.empty() && !Pf.empty(); }
  std::size_t size() const { return u0.size(); }
};

// "zero" (pressure traces included), "example1" (u0 = -1.5 sin, v0 = 1.5 cos),
// "example2" (u0 = -3 cos sin, v0 = 2 cos^2 - sin^2), and "couette" (example1
// plus the exact rotational Couette pressure traces). Throws ValidationError
// otherwise.
BoundaryData make_preset(std::string_view name, const DomainGrid& grid);
bool is_preset(std::string_view name);

// Sampled traces; derivatives come from periodic finite differences.
BoundaryData boundary_from_samples(LineFunction u0, LineFunction v0, LineFunction P0,
                                   LineFunction Pf, const DomainGrid& grid);

// Rigid rotation of the data by k theta-nodes: samples shifted by k and the
// (u, v) vector turned by the same angle.
BoundaryData rotate_boundary(const BoundaryData& b, std::size_t k, const DomainGrid& grid);

// Exact rotational Couette flow through the annulus 1 <= r <= 2 with inner
// azimuthal speed 1.5 and a resting outer wall: u_phi(t) = -0.5 t + 2 / t.
namespace couette {
double azimuthal_speed(double t);
// Integral of u_phi^2 / t, normalized to 0 at t = 1.
double pressure(double t);
}  // namespace couette

}  // namespace gmol
