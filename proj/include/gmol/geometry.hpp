#pragma once
// Star-shaped annulus {(r, theta) : r(theta) <= r <= 2 r(theta)} and the
// coefficient functions of the (t, theta) transform, t = r / r(theta).

#include <cstddef>
#include <vector>

#include "gmol/field.hpp"

namespace gmol {

// r(theta) = c_0 + sum_k c_k cos(k theta) + sum_k s_k sin(k theta).
// fourier_sine[k] multiplies sin(k theta); fourier_sine[0] has no effect.
struct BoundaryShape {
  std::vector<double> fourier_cosine{1.0};
  std::vector<double> fourier_sine;

  static BoundaryShape unit_circle() { return {}; }

  // The same curve turned by delta: r_new(theta) = r(theta - delta).
  BoundaryShape rotated(double delta) const;

  // Throws NonPositiveRadius if r <= 0 anywhere on an 8 * n_theta grid.
  void validate(std::size_t n_theta) const;
};

struct RadiusSample {
  double r;
  double dr;
  double d2r;
};

RadiusSample evaluate_radius(const BoundaryShape& shape, double theta);

// N radial lines t_n = 1 + n d (n = 0..N, d = 1/N) and M periodic angular
// nodes theta_j = 2 pi j / M.
struct DomainGrid {
  std::size_t n_lines = 0;
  std::size_t n_theta = 0;
  double d = 0.0;
  double dtheta = 0.0;
  std::vector<double> theta;
  std::vector<double> t;

  // Throws ValidationError unless N >= 2 and M >= 8.
  static DomainGrid make(std::size_t n_lines, std::size_t n_theta);

  std::size_t interior_lines() const { return n_lines - 1; }
};

// All arrays are sampled at the grid theta nodes. Immutable once built.
struct GeometryCoefficients {
  LineFunction r, dr;
  LineFunction f0, f1, df1, f2, f3, f4;
  LineFunction fhat5, fhat6, fhat7, fhat8;
  LineFunction f5, f6, f7, f8;
  LineFunction h3;
};

GeometryCoefficients build_coefficients(const BoundaryShape& shape, const DomainGrid& grid);

}  // namespace gmol
