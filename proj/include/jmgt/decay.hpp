#ifndef JMGT_DECAY_HPP
#define JMGT_DECAY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jmgt/medium.hpp"

namespace jmgt {

// Radial spectral data on R^n: the scalar amplitude f(rho) is loaded onto the
// initial mode state (amp0 f, amp1 f, amp2 f) for (psi, v, w), with
// z(0) = (c^2 - c_g^2) amp0 f. The default loads psi_1 only, whose U-vector
// has a nonvanishing zero-frequency limit (the L^1 branch of the decay
// estimates is then the binding one).
struct RadialProfile {
  enum class Family { Gaussian, SobolevLimited };
  Family family = Family::Gaussian;
  double a = 0.0;     // Gaussian: rho^a exp(-rho^2/2)
  double beta = 3.0;  // SobolevLimited: (1 + rho^2)^(-beta/2)
  int n_dim = 3;
  double amp0 = 0.0, amp1 = 1.0, amp2 = 0.0;
  double rho_max = 0.0;  // 0: family default (Gaussian 14, SobolevLimited 300)

  double eval(double rho) const;
  double effective_rho_max() const;
};

enum class ModeComponent { U, V, W };

struct RadialQuadratureOpts {
  int panels = 320;
  int nodes_per_panel = 16;
  double rho_min = 1e-4;       // innermost panel edge (first panel reaches 0)
  double convergence_tol = 1e-8;
  bool check_convergence = true;
};

// || grad^j u(t) ||_{L^2(R^n)} by Gauss-Legendre panels in rho, every node
// propagated exactly by the eigen-decomposed reduced 4x4 generator. Throws
// ResolutionError if panel doubling moves any sample beyond convergence_tol.
std::vector<double> radial_norm_evolution(const RadialProfile& profile,
                                          const MediumParams& params, const MemoryKernel& kernel,
                                          int j, const std::vector<double>& times,
                                          ModeComponent comp = ModeComponent::U,
                                          const RadialQuadratureOpts& opts = {});

struct DecayFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double t_min = 0.0, t_max = 0.0;
  double target = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Least-squares slope of log(value) against log(1+t) inside [t_min, t_max].
// Needs >= 10 positive samples in the window.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t_min, double t_max, double target = 0.0, double tol = 0.05);

// Default fit window. Transient regularity-loss bands survive to t ~ 3e2 for
// the gradient norms, so the window starts a decade after them.
inline constexpr double kFitWindowLo = 1e3;
inline constexpr double kFitWindowHi = 1e4;

std::vector<double> log_spaced(double lo, double hi, int count);

struct RegularityLossReport {
  DecayFit critical_marginal;   // Sobolev-limited data, critical medium
  DecayFit critical_smooth;     // Gaussian data, critical medium
  DecayFit subcritical_marginal;
  double beta = 0.0;
  bool degradation_observed = false;  // critical marginal fit above -1/2
};

RegularityLossReport regularity_loss_experiment(const MediumParams& params,
                                                const MemoryKernel& kernel, int n_dim,
                                                double beta_marginal = 0.0);

struct WvDecayPair {
  DecayFit w_fit;  // target -n/4 - 1/2 - j/2
  DecayFit v_fit;  // target -n/4 - j/2
};

WvDecayPair w_and_v_decay(const RadialProfile& profile, const MediumParams& params,
                          const MemoryKernel& kernel, int j);

}  // namespace jmgt

#endif
