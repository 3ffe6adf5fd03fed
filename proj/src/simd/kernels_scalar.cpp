#include "kernels_common.hpp"

namespace gmol::simd::scalar {

void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out) {
  if (order == 1) {
    const double inv_h = 1.0 / h;
    for (std::size_t j = 0; j < m; ++j) out[j] = detail::d1_at(f, m, j, inv_h);
  } else {
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t j = 0; j < m; ++j) out[j] = detail::d2_at(f, m, j, inv_h2);
  }
}

void line_residual(const LineResidualArgs& args) {
  const auto s = detail::line_scalars(args);
  for (std::size_t j = 0; j < args.m; ++j) detail::residual_at(args, s, j);
}

}  // namespace gmol::simd::scalar
