#include "jmgt/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace jmgt::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void a_axpy(std::size_t n, double a, const double* x, double* y) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_store_pd(y + i, _mm256_fmadd_pd(va, _mm256_load_pd(x + i), _mm256_load_pd(y + i)));
  for (; i < n; i++) y[i] += a * x[i];
}

void a_scale(std::size_t n, double a, double* x) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_store_pd(x + i, _mm256_mul_pd(va, _mm256_load_pd(x + i)));
  for (; i < n; i++) x[i] *= a;
}

void a_add(std::size_t n, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_store_pd(y + i, _mm256_add_pd(_mm256_load_pd(x + i), _mm256_load_pd(y + i)));
  for (; i < n; i++) y[i] += x[i];
}

void a_mul(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_store_pd(out + i, _mm256_mul_pd(_mm256_load_pd(x + i), _mm256_load_pd(y + i)));
  for (; i < n; i++) out[i] = x[i] * y[i];
}

void a_fma_acc(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_store_pd(out + i, _mm256_fmadd_pd(_mm256_load_pd(x + i), _mm256_load_pd(y + i),
                                             _mm256_load_pd(out + i)));
  for (; i < n; i++) out[i] += x[i] * y[i];
}

double a_dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_load_pd(x + i), _mm256_load_pd(y + i), acc);
  double r = hsum(acc);
  for (; i < n; i++) r += x[i] * y[i];
  return r;
}

double a_sum_sq(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_load_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double r = hsum(acc);
  for (; i < n; i++) r += x[i] * x[i];
  return r;
}

double a_weighted_sum_sq(std::size_t n, const double* w, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_load_pd(x + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), _mm256_load_pd(w + i), acc);
  }
  double r = hsum(acc);
  for (; i < n; i++) r += w[i] * x[i] * x[i];
  return r;
}

double a_weighted_dot(std::size_t n, const double* w, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(_mm256_load_pd(x + i), _mm256_load_pd(y + i));
    acc = _mm256_fmadd_pd(p, _mm256_load_pd(w + i), acc);
  }
  double r = hsum(acc);
  for (; i < n; i++) r += w[i] * x[i] * y[i];
  return r;
}

double a_max_abs(std::size_t n, const double* x) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_load_pd(x + i)));
  __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double r = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; i++) r = std::max(r, std::fabs(x[i]));
  return r;
}

void a_mode_apply4(std::size_t n, const double* const m[16], const double* const in[4],
                   double* const out[4]) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_load_pd(in[0] + i);
    __m256d b = _mm256_load_pd(in[1] + i);
    __m256d c = _mm256_load_pd(in[2] + i);
    __m256d d = _mm256_load_pd(in[3] + i);
    for (int row = 0; row < 4; row++) {
      __m256d acc = _mm256_mul_pd(_mm256_load_pd(m[4 * row + 0] + i), a);
      acc = _mm256_fmadd_pd(_mm256_load_pd(m[4 * row + 1] + i), b, acc);
      acc = _mm256_fmadd_pd(_mm256_load_pd(m[4 * row + 2] + i), c, acc);
      acc = _mm256_fmadd_pd(_mm256_load_pd(m[4 * row + 3] + i), d, acc);
      _mm256_store_pd(out[row] + i, acc);
    }
  }
  for (; i < n; i++) {
    double a = in[0][i], b = in[1][i], c = in[2][i], d = in[3][i];
    for (int row = 0; row < 4; row++)
      out[row][i] =
          m[4 * row][i] * a + m[4 * row + 1][i] * b + m[4 * row + 2][i] * c + m[4 * row + 3][i] * d;
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k = {a_axpy, a_scale,      a_add,          a_mul,     a_fma_acc, a_dot,
                            a_sum_sq, a_weighted_sum_sq, a_weighted_dot, a_max_abs, a_mode_apply4,
                            "avx2"};
  return k;
}

}  // namespace jmgt::simd

#endif
