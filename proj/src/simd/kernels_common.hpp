#pragma once
// Per-element bodies shared by both backends. Internal linkage on purpose:
// each translation unit gets its own copy compiled for its own target.

#include <cstddef>

#include "gmol/simd/kernels.hpp"

namespace gmol::simd::detail {
namespace {

// 6th-order central weights.
constexpr double kD1c1 = 3.0 / 4.0;
constexpr double kD1c2 = -3.0 / 20.0;
constexpr double kD1c3 = 1.0 / 60.0;
constexpr double kD2c0 = -49.0 / 18.0;
constexpr double kD2c1 = 3.0 / 2.0;
constexpr double kD2c2 = -3.0 / 20.0;
constexpr double kD2c3 = 1.0 / 90.0;

inline std::size_t wrap(std::ptrdiff_t j, std::size_t m) {
  const auto mm = static_cast<std::ptrdiff_t>(m);
  return static_cast<std::size_t>(((j % mm) + mm) % mm);
}

inline double d1_at(const double* f, std::size_t m, std::size_t j, double inv_h) {
  const auto jj = static_cast<std::ptrdiff_t>(j);
  const double a1 = f[wrap(jj + 1, m)] - f[wrap(jj - 1, m)];
  const double a2 = f[wrap(jj + 2, m)] - f[wrap(jj - 2, m)];
  const double a3 = f[wrap(jj + 3, m)] - f[wrap(jj - 3, m)];
  return ((kD1c1 * a1 + kD1c2 * a2) + kD1c3 * a3) * inv_h;
}

inline double d2_at(const double* f, std::size_t m, std::size_t j, double inv_h2) {
  const auto jj = static_cast<std::ptrdiff_t>(j);
  const double s1 = f[wrap(jj + 1, m)] + f[wrap(jj - 1, m)];
  const double s2 = f[wrap(jj + 2, m)] + f[wrap(jj - 2, m)];
  const double s3 = f[wrap(jj + 3, m)] + f[wrap(jj - 3, m)];
  return (((kD2c0 * f[j] + kD2c1 * s1) + kD2c2 * s2) + kD2c3 * s3) * inv_h2;
}

struct LineScalars {
  double inv_d, inv_d2, inv_t, inv_t2;
};

inline LineScalars line_scalars(const LineResidualArgs& a) {
  const double inv_d = 1.0 / a.d;
  const double inv_t = 1.0 / a.t;
  return {inv_d, inv_d * inv_d, inv_t, inv_t * inv_t};
}

struct NodeDerivs {
  double lap;  // transformed Laplacian
  double dx;   // transformed d/dx
  double dy;   // transformed d/dy
};

inline NodeDerivs node_derivs(const FieldLine& f, const LineCoefficients& g, const LineScalars& s,
                              std::size_t j) {
  const double dt = (f.cur[j] - f.prev[j]) * s.inv_d;
  const double tt = (f.next[j] - 2.0 * f.cur[j] + f.prev[j]) * s.inv_d2;
  const double mixed = (f.dcur[j] - f.dprev[j]) * s.inv_d;
  const double lap = ((tt + g.f2[j] * s.inv_t * dt) + g.f3[j] * s.inv_t * mixed) +
                     g.f4[j] * s.inv_t2 * f.d2cur[j];
  const double dx = g.f5[j] * dt + g.f6[j] * s.inv_t * f.dcur[j];
  const double dy = g.f7[j] * dt + g.f8[j] * s.inv_t * f.dcur[j];
  return {lap, dx, dy};
}

inline void residual_at(const LineResidualArgs& a, const LineScalars& s, std::size_t j) {
  const NodeDerivs u = node_derivs(a.u, a.geo, s, j);
  const NodeDerivs v = node_derivs(a.v, a.geo, s, j);
  const NodeDerivs p = node_derivs(a.p, a.geo, s, j);
  const double uc = a.u.cur[j];
  const double vc = a.v.cur[j];
  const double conv_u = a.convection ? uc * u.dx + vc * u.dy : 0.0;
  const double conv_v = a.convection ? uc * v.dx + vc * v.dy : 0.0;
  const double px = a.pressure_gradient ? p.dx : 0.0;
  const double py = a.pressure_gradient ? p.dy : 0.0;
  a.ru[j] = (a.nu * u.lap - conv_u) - px;
  a.rv[j] = (a.nu * v.lap - conv_v) - py;
  switch (a.closure) {
    case Closure::pressure_poisson:
      a.rp[j] = p.lap + a.geo.h3[j] * ((u.dx * u.dx + v.dy * v.dy) + 2.0 * (u.dy * v.dx));
      break;
    case Closure::artificial_compressibility:
      a.rp[j] = a.epsilon * p.lap + (u.dx + v.dy);
      break;
    case Closure::continuity:
      a.rp[j] = u.dx + v.dy;
      break;
  }
}

}  // namespace
}  // namespace gmol::simd::detail
