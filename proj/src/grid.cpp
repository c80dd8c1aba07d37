#include "jmgt/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace jmgt {

namespace {
// FFTW plan creation is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

Grid Grid::make(int n, int N, double L) {
  if (n < 1 || n > 3) throw ConfigError("grid: dimension must be 1, 2, or 3");
  if (N < 8 || !is_pow2(N)) throw ConfigError("grid: N must be a power of two >= 8");
  if (!(L > 0)) throw ConfigError("grid: L must be positive");
  Grid g;
  g.n = n;
  g.N = N;
  g.L = L;
  g.total = 1;
  for (int d = 0; d < n; d++) g.total *= static_cast<std::size_t>(N);

  const double dk = 2.0 * M_PI / L;
  const double k_cut = (2.0 / 3.0) * (M_PI * N / L);
  g.ksq.assign(g.total, 0.0);
  g.dealias.assign(g.total, 1.0);
  g.kcomp.assign(n, Field(g.total, 0.0));

  for (std::size_t idx = 0; idx < g.total; idx++) {
    std::size_t rem = idx;
    double k2 = 0.0;
    bool keep = true;
    // dimension n-1 is contiguous
    for (int d = n - 1; d >= 0; d--) {
      int i = static_cast<int>(rem % N);
      rem /= N;
      int m = (i <= N / 2) ? i : i - N;
      double k = dk * m;
      k2 += k * k;
      if (std::fabs(k) > k_cut) keep = false;
      g.kcomp[d][idx] = (m == -N / 2) ? 0.0 : k;  // Nyquist has no signed partner
    }
    g.ksq[idx] = k2;
    if (!keep) g.dealias[idx] = 0.0;
  }
  return g;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < n; d++) v *= dx();
  return v;
}

double Grid::coord(std::size_t idx, int d) const {
  std::size_t rem = idx;
  int i = 0;
  for (int dd = n - 1; dd >= d; dd--) {
    i = static_cast<int>(rem % N);
    rem /= N;
  }
  return dx() * i;
}

Spectral::Spectral(Grid grid) : grid_(std::move(grid)) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  int dims[3] = {grid_.N, grid_.N, grid_.N};
  CField buf(grid_.total);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  plan_fwd_ = fftw_plan_dft(grid_.n, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft(grid_.n, dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fftw plan creation failed");
}

Spectral::~Spectral() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Spectral::forward(const Field& real_in, CField& spec_out) const {
  spec_out.resize(grid_.total);
  for (std::size_t i = 0; i < grid_.total; i++) spec_out[i] = real_in[i];
  auto* p = reinterpret_cast<fftw_complex*>(spec_out.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
  const double inv = 1.0 / static_cast<double>(grid_.total);
  for (auto& c : spec_out) c *= inv;
}

void Spectral::backward(const CField& spec_in, Field& real_out) const {
  CField buf = spec_in;
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
  real_out.resize(grid_.total);
  for (std::size_t i = 0; i < grid_.total; i++) real_out[i] = buf[i].real();
}

void Spectral::gradient(const CField& spec_in, int d, Field& real_out) const {
  CField buf(grid_.total);
  const Field& k = grid_.kcomp[d];
  for (std::size_t i = 0; i < grid_.total; i++)
    buf[i] = std::complex<double>(0.0, k[i]) * spec_in[i];
  backward(buf, real_out);
}

void Spectral::apply_dealias(CField& spec) const {
  for (std::size_t i = 0; i < grid_.total; i++) spec[i] *= grid_.dealias[i];
}

double Spectral::parseval_factor() const {
  double f = 1.0;
  for (int d = 0; d < grid_.n; d++) f *= grid_.L;
  return f;
}

}  // namespace jmgt
