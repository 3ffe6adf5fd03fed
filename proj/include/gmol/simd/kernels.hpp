#pragma once
// Data-parallel inner loops over the theta nodes of one line.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The AVX2 variant evaluates the same expression tree in the same order
// (no FMA), so both produce bit-identical results; the dispatcher picks one
// at runtime.

#include <cstddef>
#include <string_view>

namespace gmol::simd {

// Third equation of the solved system.
enum class Closure {
  pressure_poisson,            // L(P) + d1(u)^2 + d2(v)^2 + 2 d2(u) d1(v)
  artificial_compressibility,  // eps L(P) + d1(u) + d2(v)
  continuity,                  // d1(u) + d2(v)
};

// One field on line n: rows n+1, n, n-1 and theta-derivatives.
struct FieldLine {
  const double* next = nullptr;
  const double* cur = nullptr;
  const double* prev = nullptr;
  const double* dcur = nullptr;   // d/dtheta of cur
  const double* dprev = nullptr;  // d/dtheta of prev
  const double* d2cur = nullptr;  // d2/dtheta2 of cur
};

struct LineCoefficients {
  const double* f2 = nullptr;
  const double* f3 = nullptr;
  const double* f4 = nullptr;
  const double* f5 = nullptr;
  const double* f6 = nullptr;
  const double* f7 = nullptr;
  const double* f8 = nullptr;
  const double* h3 = nullptr;
};

// Residuals of the three transformed equations (the physical equations times
// r^2/f0) at every node of line n.
struct LineResidualArgs {
  std::size_t m = 0;
  FieldLine u, v, p;
  LineCoefficients geo;
  double t = 1.0;
  double d = 1.0;
  double nu = 1.0;
  double epsilon = 0.0;
  Closure closure = Closure::pressure_poisson;
  bool convection = true;
  bool pressure_gradient = true;
  double* ru = nullptr;
  double* rv = nullptr;
  double* rp = nullptr;
};

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);
bool avx2_available();

// Backend used by the dispatching entry points. Defaults to AVX2 when the CPU
// supports it unless GMOL_SIMD=scalar is set.
Backend active_backend();
void set_backend(Backend b);

// Periodic 6th-order central difference of the given order (1 or 2);
// m >= 7, h is the node spacing.
void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out);
void line_residual(const LineResidualArgs& args);

namespace scalar {
void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out);
void line_residual(const LineResidualArgs& args);
}  // namespace scalar

namespace avx2 {
void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out);
void line_residual(const LineResidualArgs& args);
}  // namespace avx2

}  // namespace gmol::simd
