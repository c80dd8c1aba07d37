#ifndef JMGT_SOLVER_HPP
#define JMGT_SOLVER_HPP

#include <array>
#include <functional>
#include <string>

#include "jmgt/mode.hpp"
#include "jmgt/state.hpp"

namespace jmgt {

enum class Scheme { ExactLinear, ETD2, ETD4 };
enum class NonlinearityForm { DefF, MainSystem };

struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  Scheme scheme = Scheme::ExactLinear;
  NonlinearityForm nonlinearity_form = NonlinearityForm::DefF;
  bool dealias = true;
  int snapshot_stride = 10;
  bool store_snapshots = true;
  double blowup_factor = 1e6;  // sup-norm growth that counts as blow-up

  void validate(const MediumParams& params) const;
};

// Per-mode linear update tables: exp(dt A) (and the ETD phi-vectors) for each
// distinct |xi|^2, expanded into SoA coefficient streams so the hot loop is a
// batched real 4x4 apply over interleaved complex mode states.
struct ModeUpdateCache {
  std::size_t total = 0;
  std::array<Field, 16> exp_full;    // exp(dt A)
  std::array<Field, 16> exp_half;    // exp(dt A / 2), ETD4 only
  std::array<Field, 4> p1, p2;       // ETD2 vectors
  std::array<Field, 4> q, w1, w2, w3;  // ETD4 vectors
  Scheme scheme = Scheme::ExactLinear;

  static ModeUpdateCache build(const Spectral& sp, const MediumParams& params,
                               const MemoryKernel& kernel, double dt, Scheme scheme);
};

// (2/tau)(k v w + grad psi . grad v)   [DefF]
// (2k/tau)(v w + grad psi . grad v)    [MainSystem]
// evaluated pseudo-spectrally; the 2/3 mask is applied to the product.
// Throws BlowUpError on non-finite values.
Field rhs_nonlinear(const StateField& state, const MediumParams& params,
                    NonlinearityForm form = NonlinearityForm::DefF, bool dealias = true);

void step(StateField& state, const SolverConfig& config, const MediumParams& params,
          const MemoryKernel& kernel, const ModeUpdateCache& cache);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateField> snapshots;
  bool failed = false;
  std::string failure;
};

// hook(state, step_index) runs at every snapshot stride (and at start/end).
using DiagnosticsHook = std::function<void(const StateField&, std::size_t)>;

Trajectory run(StateField state, const SolverConfig& config, const MediumParams& params,
               const MemoryKernel& kernel, const DiagnosticsHook& hook = {});

}  // namespace jmgt

#endif
