#include "gmol/boundary.hpp"

#include <cmath>
#include <string>

#include "gmol/errors.hpp"
#include "gmol/operators.hpp"

namespace gmol {

namespace couette {
double azimuthal_speed(double t) { return -0.5 * t + 2.0 / t; }
double pressure(double t) { return 0.125 * t * t - 2.0 * std::log(t) - 2.0 / (t * t) + 1.875; }
}  // namespace couette

namespace {

template <class U0, class V0>
BoundaryData sample(const DomainGrid& grid, U0 u, V0 v) {
  BoundaryData b;
  const std::size_t m = grid.n_theta;
  for (LineFunction* a : {&b.u0, &b.du0, &b.d2u0, &b.v0, &b.dv0, &b.d2v0}) a->resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double th = grid.theta[j];
    const auto [uu, du, d2u] = u(th);
    const auto [vv, dv, d2v] = v(th);
    b.u0[j] = uu;
    b.du0[j] = du;
    b.d2u0[j] = d2u;
    b.v0[j] = vv;
    b.dv0[j] = dv;
    b.d2v0[j] = d2v;
  }
  return b;
}

struct Triple {
  double f, df, d2f;
};

}  // namespace

bool is_preset(std::string_view name) {
  return name == "zero" || name == "example1" || name == "example2" || name == "couette";
}

BoundaryData make_preset(std::string_view name, const DomainGrid& grid) {
  if (name == "zero") {
    auto b = sample(
        grid, [](double) { return Triple{0, 0, 0}; }, [](double) { return Triple{0, 0, 0}; });
    b.P0.assign(grid.n_theta, 0.0);
    b.Pf.assign(grid.n_theta, 0.0);
    return b;
  }
  if (name == "example1" || name == "couette") {
    auto b = sample(
        grid,
        [](double x) { return Triple{-1.5 * std::sin(x), -1.5 * std::cos(x), 1.5 * std::sin(x)}; },
        [](double x) { return Triple{1.5 * std::cos(x), -1.5 * std::sin(x), -1.5 * std::cos(x)}; });
    if (name == "couette") {
      b.P0.assign(grid.n_theta, couette::pressure(1.0));
      b.Pf.assign(grid.n_theta, couette::pressure(2.0));
    }
    return b;
  }
  if (name == "example2") {
    // u0 = -3 cos sin = -1.5 sin 2x; v0 = 2 cos^2 - sin^2 = 0.5 + 1.5 cos 2x.
    return sample(
        grid,
        [](double x) {
          return Triple{-1.5 * std::sin(2 * x), -3.0 * std::cos(2 * x), 6.0 * std::sin(2 * x)};
        },
        [](double x) {
          return Triple{0.5 + 1.5 * std::cos(2 * x), -3.0 * std::sin(2 * x),
                        -6.0 * std::cos(2 * x)};
        });
  }
  throw ValidationError("boundary", "unknown preset '" + std::string(name) + "'");
}

BoundaryData boundary_from_samples(LineFunction u0, LineFunction v0, LineFunction P0,
                                   LineFunction Pf, const DomainGrid& grid) {
  const std::size_t m = grid.n_theta;
  if (u0.size() != m || v0.size() != m)
    throw ValidationError("boundary", "expected " + std::to_string(m) + " samples");
  if ((!P0.empty() && P0.size() != m) || (!Pf.empty() && Pf.size() != m))
    throw ValidationError("boundary", "pressure traces must have " + std::to_string(m) + " samples");
  BoundaryData b;
  b.provenance = BoundaryData::Provenance::file;
  b.du0 = theta_derivative(u0, 1, grid.dtheta);
  b.d2u0 = theta_derivative(u0, 2, grid.dtheta);
  b.dv0 = theta_derivative(v0, 1, grid.dtheta);
  b.d2v0 = theta_derivative(v0, 2, grid.dtheta);
  b.u0 = std::move(u0);
  b.v0 = std::move(v0);
  b.P0 = std::move(P0);
  b.Pf = std::move(Pf);
  return b;
}

BoundaryData rotate_boundary(const BoundaryData& b, std::size_t k, const DomainGrid& grid) {
  const std::size_t m = grid.n_theta;
  const double delta = grid.dtheta * static_cast<double>(k);
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  auto shift = [&](const LineFunction& f) {
    if (f.empty()) return f;
    LineFunction out(m);
    for (std::size_t j = 0; j < m; ++j) out[(j + k) % m] = f[j];
    return out;
  };
  BoundaryData r = b;
  const LineFunction u[3] = {shift(b.u0), shift(b.du0), shift(b.d2u0)};
  const LineFunction v[3] = {shift(b.v0), shift(b.dv0), shift(b.d2v0)};
  LineFunction* ru[3] = {&r.u0, &r.du0, &r.d2u0};
  LineFunction* rv[3] = {&r.v0, &r.dv0, &r.d2v0};
  for (int q = 0; q < 3; ++q) {
    for (std::size_t j = 0; j < m; ++j) {
      (*ru[q])[j] = c * u[q][j] - s * v[q][j];
      (*rv[q])[j] = s * u[q][j] + c * v[q][j];
    }
  }
  r.P0 = shift(b.P0);
  r.Pf = shift(b.Pf);
  return r;
}

}  // namespace gmol
