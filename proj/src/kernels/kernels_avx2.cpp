#include "algebroid/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#define ALGEBROID_AVX2 __attribute__((target("avx2,fma")))

namespace algebroid::kernels::avx2 {

ALGEBROID_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

ALGEBROID_AVX2 void combine3(double a, const double* x, double b, const double* y, double c, const double* z,
                             double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), acc);
    acc = _mm256_fmadd_pd(vc, _mm256_loadu_pd(z + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) out[i] = std::fma(c, z[i], std::fma(b, y[i], a * x[i]));
}

ALGEBROID_AVX2 double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    vm = _mm256_max_pd(vm, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

ALGEBROID_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

}  // namespace algebroid::kernels::avx2

#endif
