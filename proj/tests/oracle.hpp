#ifndef JMGT_TESTS_ORACLE_HPP
#define JMGT_TESTS_ORACLE_HPP

// Test-only reference implementations, deliberately independent of the
// library's numerical paths (no Eigen, no FFTW, no shared kernels): polynomial
// roots by Durand-Kerner, matrix exponentials by char-poly eigendecomposition
// with a scaled-Taylor fallback, direct-convolution memory evaluation, and
// finite-difference spatial operators.

#include <complex>
#include <vector>

#include "jmgt/medium.hpp"
#include "jmgt/state.hpp"

namespace jmgt::oracle {

using Cx = std::complex<double>;
using Matrix = std::vector<std::vector<double>>;  // row-major dense

struct RootResult {
  std::vector<Cx> roots;
  double max_residual = 0.0;  // max |p(root)|
};

// Durand-Kerner iteration; coeffs ascending (c0 + c1 x + ...), leading != 0.
RootResult poly_roots(const std::vector<double>& coeffs);

// Characteristic polynomial via Faddeev-LeVerrier, ascending coefficients.
std::vector<double> char_poly(const Matrix& a);

struct ExpmResult {
  std::vector<std::vector<Cx>> value;   // complex to keep the pipeline exact
  bool eigen_path = true;               // false: scaled-Taylor fallback
  double cond_estimate = 0.0;
};

// V diag(e^{lambda t}) V^{-1}; falls back to scaled Taylor when the
// eigenvector matrix is ill-conditioned (> 1e12).
ExpmResult expm_eigen(const Matrix& a, double t);

std::vector<double> expm_apply(const Matrix& a, double t, const std::vector<double>& x);

// trapezoid evaluation of int_0^t g(r) psi(t - r) dr pointwise over the grid,
// from a stored uniform-dt trajectory of psi (psi_history[k] at time k dt);
// end-corrected to match the library's quadrature accuracy class.
Field direct_convolution(const std::vector<Field>& psi_history, double dt,
                         const MediumParams& params, const MemoryKernel& kernel);

// second-order centered finite-difference gradient/laplacian on the torus
Field fd_gradient_component(const Grid& grid, const Field& f, int d);
Field fd_laplacian(const Grid& grid, const Field& f);

}  // namespace jmgt::oracle

#endif
