// AVX2 variants. Each function carries target("avx2") instead of compiling
// the whole translation unit for AVX2, so no AVX2 code leaks into inline
// functions shared with the scalar path. No FMA: rounding must match scalar.

#include "kernels_common.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define GMOL_AVX2_TARGET __attribute__((target("avx2")))
#define GMOL_HAVE_X86 1
#else
#define GMOL_AVX2_TARGET
#define GMOL_HAVE_X86 0
#endif

namespace gmol::simd::avx2 {

#if GMOL_HAVE_X86

namespace {

struct V {
  __m256d x;
};

GMOL_AVX2_TARGET inline V ld(const double* p) { return {_mm256_loadu_pd(p)}; }
GMOL_AVX2_TARGET inline V bc(double s) { return {_mm256_set1_pd(s)}; }
GMOL_AVX2_TARGET inline V operator+(V a, V b) { return {_mm256_add_pd(a.x, b.x)}; }
GMOL_AVX2_TARGET inline V operator-(V a, V b) { return {_mm256_sub_pd(a.x, b.x)}; }
GMOL_AVX2_TARGET inline V operator*(V a, V b) { return {_mm256_mul_pd(a.x, b.x)}; }
GMOL_AVX2_TARGET inline void st(double* p, V a) { _mm256_storeu_pd(p, a.x); }

struct VecDerivs {
  V lap, dx, dy;
};

GMOL_AVX2_TARGET inline VecDerivs vec_derivs(const FieldLine& f, const LineCoefficients& g,
                                              const detail::LineScalars& s, std::size_t j) {
  const V inv_d = bc(s.inv_d);
  const V inv_t = bc(s.inv_t);
  const V cur = ld(f.cur + j);
  const V prev = ld(f.prev + j);
  const V dcur = ld(f.dcur + j);
  const V dt = (cur - prev) * inv_d;
  const V tt = (ld(f.next + j) - bc(2.0) * cur + prev) * bc(s.inv_d2);
  const V mixed = (dcur - ld(f.dprev + j)) * inv_d;
  const V lap = ((tt + ld(g.f2 + j) * inv_t * dt) + ld(g.f3 + j) * inv_t * mixed) +
                ld(g.f4 + j) * bc(s.inv_t2) * ld(f.d2cur + j);
  const V dx = ld(g.f5 + j) * dt + ld(g.f6 + j) * inv_t * dcur;
  const V dy = ld(g.f7 + j) * dt + ld(g.f8 + j) * inv_t * dcur;
  return {lap, dx, dy};
}

}  // namespace

GMOL_AVX2_TARGET void periodic_derivative(const double* f, std::size_t m, int order, double h,
                                          double* out) {
  // Nodes whose stencil does not wrap: [3, m-3).
  const std::size_t lo = 3;
  const std::size_t hi = m >= 6 ? m - 3 : 3;
  std::size_t j = lo;
  if (order == 1) {
    const double inv_h = 1.0 / h;
    for (std::size_t k = 0; k < lo && k < m; ++k) out[k] = detail::d1_at(f, m, k, inv_h);
    const V c1 = bc(detail::kD1c1), c2 = bc(detail::kD1c2), c3 = bc(detail::kD1c3);
    const V vh = bc(inv_h);
    for (; j + 4 <= hi; j += 4) {
      const V a1 = ld(f + j + 1) - ld(f + j - 1);
      const V a2 = ld(f + j + 2) - ld(f + j - 2);
      const V a3 = ld(f + j + 3) - ld(f + j - 3);
      st(out + j, ((c1 * a1 + c2 * a2) + c3 * a3) * vh);
    }
    for (; j < m; ++j) out[j] = detail::d1_at(f, m, j, inv_h);
  } else {
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t k = 0; k < lo && k < m; ++k) out[k] = detail::d2_at(f, m, k, inv_h2);
    const V c0 = bc(detail::kD2c0), c1 = bc(detail::kD2c1), c2 = bc(detail::kD2c2),
            c3 = bc(detail::kD2c3);
    const V vh = bc(inv_h2);
    for (; j + 4 <= hi; j += 4) {
      const V s1 = ld(f + j + 1) + ld(f + j - 1);
      const V s2 = ld(f + j + 2) + ld(f + j - 2);
      const V s3 = ld(f + j + 3) + ld(f + j - 3);
      st(out + j, (((c0 * ld(f + j) + c1 * s1) + c2 * s2) + c3 * s3) * vh);
    }
    for (; j < m; ++j) out[j] = detail::d2_at(f, m, j, inv_h2);
  }
}

GMOL_AVX2_TARGET void line_residual(const LineResidualArgs& a) {
  const auto s = detail::line_scalars(a);
  std::size_t j = 0;
  const V nu = bc(a.nu);
  const V eps = bc(a.epsilon);
  const V two = bc(2.0);
  const V zero = bc(0.0);
  for (; j + 4 <= a.m; j += 4) {
    const VecDerivs u = vec_derivs(a.u, a.geo, s, j);
    const VecDerivs v = vec_derivs(a.v, a.geo, s, j);
    const VecDerivs p = vec_derivs(a.p, a.geo, s, j);
    const V uc = ld(a.u.cur + j);
    const V vc = ld(a.v.cur + j);
    const V conv_u = a.convection ? uc * u.dx + vc * u.dy : zero;
    const V conv_v = a.convection ? uc * v.dx + vc * v.dy : zero;
    const V px = a.pressure_gradient ? p.dx : zero;
    const V py = a.pressure_gradient ? p.dy : zero;
    st(a.ru + j, (nu * u.lap - conv_u) - px);
    st(a.rv + j, (nu * v.lap - conv_v) - py);
    switch (a.closure) {
      case Closure::pressure_poisson:
        st(a.rp + j, p.lap + ld(a.geo.h3 + j) * ((u.dx * u.dx + v.dy * v.dy) + two * (u.dy * v.dx)));
        break;
      case Closure::artificial_compressibility:
        st(a.rp + j, eps * p.lap + (u.dx + v.dy));
        break;
      case Closure::continuity:
        st(a.rp + j, u.dx + v.dy);
        break;
    }
  }
  for (; j < a.m; ++j) detail::residual_at(a, s, j);
}

#else

void periodic_derivative(const double* f, std::size_t m, int order, double h, double* out) {
  scalar::periodic_derivative(f, m, order, h, out);
}
void line_residual(const LineResidualArgs& a) { scalar::line_residual(a); }

#endif

}  // namespace gmol::simd::avx2
