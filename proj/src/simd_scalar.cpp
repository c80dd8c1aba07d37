#include "jmgt/simd/kernels.hpp"

#include <cmath>

namespace jmgt::simd {
namespace {

void s_axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; i++) y[i] += a * x[i];
}

void s_scale(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; i++) x[i] *= a;
}

void s_add(std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; i++) y[i] += x[i];
}

void s_mul(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; i++) out[i] = x[i] * y[i];
}

void s_fma_acc(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; i++) out[i] += x[i] * y[i];
}

double s_dot(std::size_t n, const double* x, const double* y) {
  double acc = 0;
  for (std::size_t i = 0; i < n; i++) acc += x[i] * y[i];
  return acc;
}

double s_sum_sq(std::size_t n, const double* x) {
  double acc = 0;
  for (std::size_t i = 0; i < n; i++) acc += x[i] * x[i];
  return acc;
}

double s_weighted_sum_sq(std::size_t n, const double* w, const double* x) {
  double acc = 0;
  for (std::size_t i = 0; i < n; i++) acc += w[i] * x[i] * x[i];
  return acc;
}

double s_weighted_dot(std::size_t n, const double* w, const double* x, const double* y) {
  double acc = 0;
  for (std::size_t i = 0; i < n; i++) acc += w[i] * x[i] * y[i];
  return acc;
}

double s_max_abs(std::size_t n, const double* x) {
  double m = 0;
  for (std::size_t i = 0; i < n; i++) m = std::max(m, std::fabs(x[i]));
  return m;
}

void s_mode_apply4(std::size_t n, const double* const m[16], const double* const in[4],
                   double* const out[4]) {
  for (std::size_t i = 0; i < n; i++) {
    double a = in[0][i], b = in[1][i], c = in[2][i], d = in[3][i];
    out[0][i] = m[0][i] * a + m[1][i] * b + m[2][i] * c + m[3][i] * d;
    out[1][i] = m[4][i] * a + m[5][i] * b + m[6][i] * c + m[7][i] * d;
    out[2][i] = m[8][i] * a + m[9][i] * b + m[10][i] * c + m[11][i] * d;
    out[3][i] = m[12][i] * a + m[13][i] * b + m[14][i] * c + m[15][i] * d;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {s_axpy, s_scale,      s_add,          s_mul,     s_fma_acc, s_dot,
                            s_sum_sq, s_weighted_sum_sq, s_weighted_dot, s_max_abs, s_mode_apply4,
                            "scalar"};
  return k;
}

}  // namespace jmgt::simd
