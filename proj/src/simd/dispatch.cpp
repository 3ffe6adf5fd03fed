#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gmol/simd/kernels.hpp"

namespace gmol::simd {

namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("GMOL_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Backend::scalar;
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  current().store(b, std::memory_order_relaxed);
}

void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out) {
  if (active_backend() == Backend::avx2)
    avx2::periodic_derivative(f, m, order, h, out);
  else
    scalar::periodic_derivative(f, m, order, h, out);
}

void line_residual(const LineResidualArgs& args) {
  if (active_backend() == Backend::avx2)
    avx2::line_residual(args);
  else
    scalar::line_residual(args);
}

}  // namespace gmol::simd
