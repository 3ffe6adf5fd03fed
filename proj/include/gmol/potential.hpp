#pragma once
// Divergence-free velocity from three potentials on a rectangle, with checks
// of the identities that make the convective term a gradient:
//   lap w2 + 2 w1_xy = 0,   lap w0 + w1_xx - w1_yy = 0,
//   u = w0_x + w1_x + w2_y,  v = w0_y - w1_y - w2_x.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gmol/errors.hpp"
#include "gmol/field.hpp"

namespace gmol {

// Node (i, j) sits at (x0 + i h, y0 + j h); fields are nx x ny.
struct RectGrid {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  std::size_t nx = 0, ny = 0;
  double h = 0.0;

  // Unit square with n x n nodes.
  static RectGrid square(std::size_t n);
  // Throws ValidationError unless nx, ny >= 16 and both spacings agree.
  static RectGrid make(double x0, double x1, double y0, double y1, std::size_t nx,
                       std::size_t ny);

  double x(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * h; }
  bool on_edge(std::size_t i, std::size_t j) const {
    return i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
  }
};

using ScalarFn = std::function<double(double, double)>;

// A field given in closed form together with the derivatives the theorem uses.
struct AnalyticField {
  std::string name;
  ScalarFn value, dx, dy, dxx, dyy, dxy;

  static AnalyticField zero();
  static AnalyticField xy();
  static AnalyticField sin_sin();    // sin x sin y
  static AnalyticField x_squared();  // x^2
  // "zero", "xy", "sin_sin", "x2". Throws ValidationError.
  static AnalyticField named(std::string_view name);

  Field sample(const RectGrid& g) const;
};

struct PotentialTriple {
  Field w0, w1, w2;
};

// w1 sampled from the analytic field; w2 and w0 from 5-point Poisson solves
// with Dirichlet data bc2, bc0 on the edges. Throws SolveFailure when the
// scaled algebraic residual exceeds 1e-12.
PotentialTriple solve_potentials(const AnalyticField& w1, const ScalarFn& bc0,
                                 const ScalarFn& bc2, const RectGrid& grid);

// Interior 5-point residuals of the two potential equations (edges zero).
struct PotentialResiduals {
  Field w2_equation, w0_equation;
};
PotentialResiduals potential_residuals(const PotentialTriple& p, const AnalyticField& w1,
                                       const RectGrid& grid);

// Fourth-order differences: central inside, one-sided on the two outermost
// nodes of each direction.
Field diff_x(const Field& f, const RectGrid& g);
Field diff_y(const Field& f, const RectGrid& g);
Field diff_xx(const Field& f, const RectGrid& g);
Field diff_yy(const Field& f, const RectGrid& g);

struct Velocity {
  Field u, v;
};

Velocity velocity_from_potentials(const PotentialTriple& p, const RectGrid& grid);

Field divergence(const Field& u, const Field& v, const RectGrid& grid);

struct Convective {
  Field h1, h2, curl;  // curl = d(h1)/dy - d(h2)/dx
};
Convective convective_curl(const Field& u, const Field& v, const RectGrid& grid);

struct PressureRecovery {
  Field P;  // row-first path integral, P(x0, y0) = 0
  double path_independence_defect = 0.0;
  double limit = 0.0;  // 100 h^2
};

// Integrates G = (nu lap u - h1 + f_x, nu lap v - h2 + f_y) with the trapezoid
// rule along grid paths from (x0, y0), once x-then-y and once y-then-x.
// Throws NotAGradient when the two differ by more than 100 h^2.
PressureRecovery recover_pressure(const Field& u, const Field& v, const AnalyticField& f,
                                  double nu, const RectGrid& grid);

// Momentum residuals nu lap u - h1 - P_x + f_x and the v counterpart.
struct MomentumResidual {
  Field ru, rv;
};
MomentumResidual momentum_residual(const Field& u, const Field& v, const Field& P,
                                   const AnalyticField& f, double nu, const RectGrid& grid);

struct CertificationCase {
  double divergence_sup = 0.0;
  // Off the edges, where every curl difference has a central outer stencil.
  // On the edges the one-sided stencils put the roundoff floor near 1e-8.
  double curl_sup = 0.0;
  double curl_sup_with_edges = 0.0;
  double potential_residual_sup = 0.0;
  double pressure_defect = 0.0;
  double momentum_sup = 0.0;
  double pressure_error = -1.0;  // vs. the closed form when one is known, else -1
};

struct CertificationReport {
  std::string w1, forcing;
  std::size_t n = 0;
  double h = 0.0;
  double nu = 1.0;
  CertificationCase main;
  // Refinement study on w1 = sin x sin y.
  std::vector<std::size_t> refinement_n;
  std::vector<double> refinement_divergence, refinement_curl;
  double divergence_order = 0.0, curl_order = 0.0;  // from the two finest grids
};

// Traces come from closed forms: w1 = "xy" uses w2 = -(x^2 + y^2)/2, w0 = x^2 - y^2;
// "sin_sin" uses w2 = cos x cos y + x^2 - y^2, w0 = x^3 - 3xy^2 on [pi/2, 3pi/2]^2
// (the refinement study too); "x2" uses w0 = -x^2. Everything else is on [0, 1]^2.
// For "xy" P is compared against -2(x^2 + y^2) + f.
CertificationReport certify(std::string_view w1, std::string_view forcing, std::size_t n,
                            double nu = 1.0,
                            const std::vector<std::size_t>& refinement = {33, 65, 129});

}  // namespace gmol
