#ifndef JMGT_SIMD_KERNELS_HPP
#define JMGT_SIMD_KERNELS_HPP

#include <cstddef>
#include <string>

namespace jmgt::simd {

// Hot inner loops of the solver and the norm machinery. Every kernel has a
// scalar reference implementation and (on x86-64) an AVX2+FMA variant; the
// active backend is picked once at startup from cpuid and can be forced with
// the JMGT_SIMD environment variable ("scalar" | "avx2") or set_backend().
//
// Contracts (all arrays length n, 64-byte aligned, non-overlapping unless
// stated):
//   axpy        y[i] += a * x[i]
//   scale       x[i] *= a
//   add         y[i] += x[i]
//   mul         out[i] = x[i] * y[i]
//   fma_acc     out[i] += x[i] * y[i]
//   dot         sum_i x[i] * y[i]
//   sum_sq      sum_i x[i]^2
//   weighted_sum_sq   sum_i w[i] * x[i]^2
//   weighted_dot      sum_i w[i] * x[i] * y[i]
//   max_abs     max_i |x[i]|
//   mode_apply4 batched real 4x4 matrix times packed state: for each i,
//               out_c[i] = sum_j m[4*c+j][i] * in_j[i]; used with interleaved
//               re/im streams and pairwise-duplicated coefficient arrays, so a
//               real per-mode matrix acts on complex mode states. in/out may
//               not alias.
struct Kernels {
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  void (*scale)(std::size_t n, double a, double* x);
  void (*add)(std::size_t n, const double* x, double* y);
  void (*mul)(std::size_t n, const double* x, const double* y, double* out);
  void (*fma_acc)(std::size_t n, const double* x, const double* y, double* out);
  double (*dot)(std::size_t n, const double* x, const double* y);
  double (*sum_sq)(std::size_t n, const double* x);
  double (*weighted_sum_sq)(std::size_t n, const double* w, const double* x);
  double (*weighted_dot)(std::size_t n, const double* w, const double* x, const double* y);
  double (*max_abs)(std::size_t n, const double* x);
  void (*mode_apply4)(std::size_t n, const double* const m[16], const double* const in[4],
                      double* const out[4]);
  const char* name;
};

const Kernels& active();
const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();  // only callable when avx2_supported()
#endif

bool avx2_supported();
// Returns false if the requested backend is unavailable on this machine.
bool set_backend(const std::string& name);

}  // namespace jmgt::simd

#endif
