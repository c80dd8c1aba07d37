#ifndef JMGT_STATE_HPP
#define JMGT_STATE_HPP

#include <cstdint>
#include <optional>

#include "jmgt/grid.hpp"
#include "jmgt/medium.hpp"

namespace jmgt {

enum class MemoryRepr { ReducedZ, History };

// eta(x, r_j), r_j = j*dr for j = 0..n_r, stored as a ring of field slots so a
// time step shifts ages in O(1) plus one source update. eta at age 0 is
// identically zero (Dafermos boundary).
//
// The standard initial data eta(0, r) = psi_0 for r > 0 is discontinuous at
// r = 0; the jump transports to the data horizon r = t and never smooths, so
// the quadrature splits there. `jump` holds the discontinuity height (the
// stored node at the horizon carries the left limit) and `horizon` counts the
// shifts taken.
struct HistoryField {
  int n_r = 0;
  double dr = 0.0;
  std::size_t field_size = 0;
  int head = 0;
  int horizon = 0;
  std::vector<Field> slots;  // n_r + 1 slots
  Field jump;                // empty means no discontinuity

  void init(int n_r_, double dr_, std::size_t field_size_);
  Field& at_age(int j) { return slots[(head + j) % (n_r + 1)]; }
  const Field& at_age(int j) const { return slots[(head + j) % (n_r + 1)]; }
  double r_max() const { return n_r * dr; }
  bool empty() const { return slots.empty(); }
};

struct StateField {
  SpectralPtr spectral;
  Field psi, v, w;
  MemoryRepr repr = MemoryRepr::ReducedZ;
  Field z;           // ReducedZ representation
  HistoryField eta;  // History representation
  double time = 0.0;

  const Grid& grid() const { return spectral->grid(); }
};

struct ProfileSpec {
  enum class Kind { Zero, GaussianBump, FourierMode, BandRandom };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double width = 1.0;               // GaussianBump: exp(-|x - L/2|^2 / (2 width^2))
  std::vector<int> mode = {1};      // FourierMode: sin(2 pi m.x / L)
  double k_cutoff = 2.0;            // BandRandom: modulus amplitude * exp(-(|k|/k_cutoff)^2)
  bool zero_mean = false;
};

struct InitialData {
  ProfileSpec psi0, psi1, psi2;
  std::uint64_t seed = 1;
};

Field generate_profile(const Spectral& sp, const ProfileSpec& spec, std::uint64_t seed,
                       int component_tag);

// psi = psi0, v = psi1, w = psi2; History: eta(., r) = psi0 for r > 0 and
// eta(., 0) = 0; ReducedZ: z = (c^2 - c_g^2) psi0. ReducedZ requires an
// exponential kernel.
StateField init_state(SpectralPtr spectral, const InitialData& data, const MediumParams& params,
                      const MemoryKernel& kernel, MemoryRepr repr,
                      std::optional<double> age_dr = std::nullopt,
                      double r_max_factor = 25.0);

// Shift-then-source along characteristics: eta(., r + dt) <- eta(., r) + dt*v.
// Pass the step-mean v (i.e. (psi(t+dt) - psi(t))/dt) and the update is exact.
// dt must equal the age spacing.
void advance_history(StateField& state, const Field& v_mean, double dt);

// z(x) = int_0^inf g(r) eta(x, r) dr: end-corrected trapezoid over the age
// grid plus the exponential tail g(r_max) tau_g eta(r_max).
Field reduce_history(const StateField& state, const MediumParams& params,
                     const MemoryKernel& kernel);

// Age-quadrature weights for int_0^inf g(r) f(r) dr on the state's age grid:
// end-corrected trapezoid plus tail. Shared by reduce_history and the energy
// machinery so every g-weighted integral uses one rule.
std::vector<double> age_quadrature_weights(int n_r, double dr, const MediumParams& params,
                                           const MemoryKernel& kernel,
                                           bool negative_g_prime_weight);

// Horizon-split variant for histories carrying the transported initial
// discontinuity at node j_h: the returned weights apply to the stored values
// (left limit at the horizon); b_out gets one nonzero entry, the piece-B
// weight of the horizon node, to be applied to (stored + jump).
std::vector<double> split_age_weights(int n_r, double dr, const MediumParams& params,
                                      const MemoryKernel& kernel, bool negative_g_prime_weight,
                                      int j_h, std::vector<double>* b_out);

}  // namespace jmgt

#endif
