#include "gmol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmol/errors.hpp"

namespace gmol {

BoundaryShape BoundaryShape::rotated(double delta) const {
  BoundaryShape out = *this;
  const std::size_t k_max = std::max(fourier_cosine.size(), fourier_sine.size());
  out.fourier_cosine.assign(k_max, 0.0);
  out.fourier_sine.assign(k_max, 0.0);
  for (std::size_t k = 0; k < k_max; ++k) {
    const double c = k < fourier_cosine.size() ? fourier_cosine[k] : 0.0;
    const double s = k < fourier_sine.size() ? fourier_sine[k] : 0.0;
    const double ck = std::cos(static_cast<double>(k) * delta);
    const double sk = std::sin(static_cast<double>(k) * delta);
    out.fourier_cosine[k] = c * ck - s * sk;
    out.fourier_sine[k] = k == 0 ? 0.0 : c * sk + s * ck;
  }
  return out;
}

void BoundaryShape::validate(std::size_t n_theta) const {
  const std::size_t dense = 8 * std::max<std::size_t>(n_theta, 1);
  for (std::size_t j = 0; j < dense; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(dense);
    const double r = evaluate_radius(*this, th).r;
    if (!(r > 0.0)) throw NonPositiveRadius(th, r);
  }
}

RadiusSample evaluate_radius(const BoundaryShape& shape, double theta) {
  RadiusSample s{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < shape.fourier_cosine.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double c = shape.fourier_cosine[k];
    s.r += c * std::cos(kk * theta);
    s.dr -= c * kk * std::sin(kk * theta);
    s.d2r -= c * kk * kk * std::cos(kk * theta);
  }
  for (std::size_t k = 1; k < shape.fourier_sine.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double c = shape.fourier_sine[k];
    s.r += c * std::sin(kk * theta);
    s.dr += c * kk * std::cos(kk * theta);
    s.d2r -= c * kk * kk * std::sin(kk * theta);
  }
  return s;
}

DomainGrid DomainGrid::make(std::size_t n_lines, std::size_t n_theta) {
  if (n_lines < 2) throw ValidationError("N", "need at least 2 lines");
  if (n_theta < 8) throw ValidationError("M", "need at least 8 theta nodes");
  DomainGrid g;
  g.n_lines = n_lines;
  g.n_theta = n_theta;
  g.d = 1.0 / static_cast<double>(n_lines);
  g.dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
  g.theta.resize(n_theta);
  for (std::size_t j = 0; j < n_theta; ++j)
    g.theta[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_theta);
  g.t.resize(n_lines + 1);
  for (std::size_t n = 0; n <= n_lines; ++n)
    g.t[n] = 1.0 + static_cast<double>(n) / static_cast<double>(n_lines);
  g.t.back() = 2.0;
  return g;
}

GeometryCoefficients build_coefficients(const BoundaryShape& shape, const DomainGrid& grid) {
  const std::size_t m = grid.n_theta;
  GeometryCoefficients g;
  for (LineFunction* a : {&g.r, &g.dr, &g.f0, &g.f1, &g.df1, &g.f2, &g.f3, &g.f4, &g.fhat5,
                          &g.fhat6, &g.fhat7, &g.fhat8, &g.f5, &g.f6, &g.f7, &g.f8, &g.h3})
    a->resize(m);

  for (std::size_t j = 0; j < m; ++j) {
    const double th = grid.theta[j];
    const auto [r, dr, d2r] = evaluate_radius(shape, th);
    if (!(r > 0.0)) throw NonPositiveRadius(th, r);
    const double r2 = r * r;
    const double c = std::cos(th);
    const double s = std::sin(th);

    const double f1 = -dr / r;
    const double f0 = 1.0 + f1 * f1;
    const double df1 = -(d2r * r - dr * dr) / r2;

    g.r[j] = r;
    g.dr[j] = dr;
    g.f1[j] = f1;
    g.df1[j] = df1;
    g.f0[j] = f0;
    g.f2[j] = 1.0 + df1 / f0;
    g.f4[j] = 1.0 / f0;
    g.f3[j] = 2.0 * f1 * g.f4[j];
    g.h3[j] = f0 / r2;

    g.fhat5[j] = c / r + s * dr / r2;
    g.fhat6[j] = -s / r;
    g.fhat7[j] = s / r - c * dr / r2;
    g.fhat8[j] = c / r;

    const double scale = r2 / f0;
    g.f5[j] = scale * g.fhat5[j];
    g.f6[j] = scale * g.fhat6[j];
    g.f7[j] = scale * g.fhat7[j];
    g.f8[j] = scale * g.fhat8[j];
  }
  return g;
}

}  // namespace gmol
