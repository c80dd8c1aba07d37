#ifndef JMGT_MEDIUM_HPP
#define JMGT_MEDIUM_HPP

#include <optional>
#include <string>
#include <vector>

namespace jmgt {

// Physical constants of the relaxing medium. alpha is fixed to 1; it is kept
// as a field so configs can state it explicitly.
struct MediumParams {
  double tau = 1.0;    // thermal relaxation time [s]
  double c = 1.0;      // sound speed [m/s]
  double b = 1.0;      // diffusivity coefficient [m^2/s]
  double k = 0.0;      // nonlinearity coefficient
  double alpha = 1.0;  // friction coefficient

  // sound diffusivity delta = b - tau c^2; zero in the critical regime
  double delta() const { return b - tau * c * c; }
  double chi() const { return alpha - c * c * tau / b; }
  void validate() const;  // throws ConfigError on nonpositive tau, c, b
};

enum class Regime { Subcritical, Critical, SupercriticalChiNegative };

struct RegimeReport {
  Regime regime;
  double chi;
  double delta;
};

// Relative tolerance for the criticality test. Criticality is a symbolic
// relation between user-supplied parameters, so this is roundoff-sized.
inline constexpr double kCriticalTolRel = 1e-12;

struct MemoryKernel {
  enum class Kind { Exponential, Tabulated };
  Kind kind = Kind::Exponential;

  // Exponential: g(r) = m c^2 exp(-r / tau_g).
  double m = 0.0;
  double tau_g = 1.0;

  // Tabulated: samples (r_i, g_i), r_i strictly increasing, interpolated by a
  // monotone (Fritsch-Carlson) cubic. g is 0 beyond the last sample.
  std::vector<double> r_samples;
  std::vector<double> g_samples;

  // optional user-declared decay-ratio bound zeta with g' <= -zeta g [1/s]
  std::optional<double> zeta;

  static MemoryKernel exponential(double m, double tau_g, double c);
  static MemoryKernel tabulated(std::vector<double> r, std::vector<double> g);
  static MemoryKernel from_csv(const std::string& path);

  bool is_exponential() const { return kind == Kind::Exponential; }
  double g(double r, const MediumParams& p) const;
  double g_prime(double r, const MediumParams& p) const;
  double g0(const MediumParams& p) const { return g(0.0, p); }
  // integral of g over (0, inf); closed form for exponential kernels,
  // adaptive quadrature of the interpolant for tabulated ones
  double integral(const MediumParams& p) const;

 private:
  // Fritsch-Carlson tangents, built lazily on first evaluation.
  mutable std::vector<double> tangents_;
  void ensure_tangents() const;
};

struct AssumptionCheck {
  bool pass = false;
  double witness_r = 0.0;  // probe location of the worst case
  std::string detail;
};

struct KernelReport {
  AssumptionCheck g1, g2, g3, g4;
  double c_g_sq = 0.0;   // c^2 - int g, valid when g2 passes
  double zeta_best = 0.0;
  bool all_pass() const { return g1.pass && g2.pass && g3.pass && g4.pass; }
};

// Checks (G1)-(G4) on a probe grid (exactly, for exponential kernels) and
// reports the largest admissible zeta. Throws ConfigError for a nonpositive
// tau_g or a tabulated kernel with fewer than 3 samples.
KernelReport validate_assumptions(const MemoryKernel& kernel, const MediumParams& params);

// c_g^2 = c^2 - int_0^inf g. Throws std::domain_error when int g >= c^2.
double effective_speed_sq(const MemoryKernel& kernel, const MediumParams& params);

RegimeReport classify_regime(const MediumParams& params, const MemoryKernel& kernel);

}  // namespace jmgt

#endif
