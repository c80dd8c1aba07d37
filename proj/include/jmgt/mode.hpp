#ifndef JMGT_MODE_HPP
#define JMGT_MODE_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "jmgt/medium.hpp"

namespace jmgt {

enum class ModeRepresentation { Reduced, HistoryGrid };

struct HistoryGridSpec {
  int n_age = 512;     // age intervals; eta is carried at r_j = j*dr, j=1..n_age
  double r_max = 20.0;
};

// Per-frequency linear generator. Reduced: the 4x4 over (psi, v, w, z) with
// z = int_0^inf g(r) eta(r) dr, exact for exponential kernels:
//   psi' = v
//   v'   = w
//   tau w' = -w - c_g^2 rho^2 psi - b rho^2 v - rho^2 z
//   z'   = (c^2 - c_g^2) v - z / tau_g
// HistoryGrid: (3 + n_age)^2 over (psi, v, w, eta_1..eta_n) with eta(0) = 0,
// second-order upwind transport, Simpson memory quadrature with exponential
// tail correction, assembled in sqrt(g)-weighted history variables (a
// similarity transform; the spectrum is unchanged but the rounding-induced
// eigenvalue cloud of the defective transport block stays left of the
// physical roots).
struct ModeSystem {
  double rho_sq = 0.0;
  Eigen::MatrixXd generator;
  MediumParams params;
  MemoryKernel kernel;
  ModeRepresentation representation = ModeRepresentation::Reduced;
};

ModeSystem assemble_mode_system(const MediumParams& params, const MemoryKernel& kernel,
                                double rho_sq);
ModeSystem assemble_mode_system(const MediumParams& params, const MemoryKernel& kernel,
                                double rho_sq, const HistoryGridSpec& spec);

// Characteristic polynomial of the reduced generator, ascending coefficients:
//   tau L^4 + (1 + tau/tau_g) L^3 + (1/tau_g + b rho^2) L^2
//     + rho^2 (b/tau_g + c^2) L + c_g^2 rho^2 / tau_g.
std::array<double, 5> reduced_char_poly(const MediumParams& params, const MemoryKernel& kernel,
                                        double rho_sq);

enum class StabilityClass { AsymptoticallyStable, Marginal, Unstable };

// Routh-Hurwitz test on tau L^3 + L^2 + b rho^2 L + c^2 rho^2 (memoryless
// symbol): stable iff b > tau c^2, independent of rho for rho > 0. Throws
// std::invalid_argument for rho_sq = 0 (degenerate mode).
StabilityClass routh_hurwitz_no_memory(const MediumParams& params, double rho_sq);

struct SpectrumSample {
  double rho = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  double abscissa = 0.0;
  bool converged = true;
};

struct AbscissaCurve {
  std::vector<SpectrumSample> samples;   // ordered by rho
  double low_coef = 0.0;   // lambda in abscissa ~ -lambda rho^2 as rho -> 0
  double high_coef = 0.0;  // lambda in abscissa ~ -lambda / rho^2 as rho -> inf
};

SpectrumSample mode_spectrum(const MediumParams& params, const MemoryKernel& kernel, double rho);

// Eigen-decomposition sweep over a sorted positive grid (>= 20 points, >= 4
// decades). The asymptotic coefficients are fitted on the outermost decades
// (>= 5 points each). Solver failures flag the sample and the sweep goes on.
AbscissaCurve abscissa_sweep(const MediumParams& params, const MemoryKernel& kernel,
                             const std::vector<double>& rho_grid);

// exp(t * generator) * state0. Throws std::overflow_error on non-finite output.
Eigen::VectorXd propagate_mode(const ModeSystem& system, const Eigen::VectorXd& state0, double t);

// z(0) = (c^2 - c_g^2) psi_0, forced by eta(t=0) = psi_0.
double reduced_z_init_factor(const MediumParams& params, const MemoryKernel& kernel);

}  // namespace jmgt

#endif
