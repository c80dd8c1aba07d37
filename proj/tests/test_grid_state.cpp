#include <doctest.h>

#include <cmath>
#include <random>

#include "jmgt/grid.hpp"
#include "jmgt/simd/kernels.hpp"
#include "jmgt/state.hpp"

using namespace jmgt;

namespace {

MediumParams critical() { return {1.0, 1.0, 1.0, 0.0, 1.0}; }
MemoryKernel mem_half() { return MemoryKernel::exponential(0.5, 1.0, 1.0); }

Field random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(g.total);
  for (auto& x : f) x = dist(rng);
  return f;
}

double rel_l2_diff(const Field& a, const Field& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); i++) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("transform round trip") {
  for (int n = 1; n <= 3; n++) {
    int N = n == 3 ? 16 : 64;
    Spectral sp(Grid::make(n, N, 7.0));
    Field f = random_field(sp.grid(), 100 + n);
    CField hat;
    sp.forward(f, hat);
    Field back;
    sp.backward(hat, back);
    CHECK(rel_l2_diff(back, f) < 1e-12);
  }
}

TEST_CASE("dealias mask is idempotent and bounds the band") {
  Spectral sp(Grid::make(2, 32, 5.0));
  Field f = random_field(sp.grid(), 9);
  CField hat;
  sp.forward(f, hat);
  CField once = hat;
  sp.apply_dealias(once);
  CField twice = once;
  sp.apply_dealias(twice);
  for (std::size_t i = 0; i < once.size(); i++) CHECK(once[i] == twice[i]);
  const Grid& g = sp.grid();
  double cut = (2.0 / 3.0) * (M_PI * g.N / g.L);
  for (std::size_t i = 0; i < g.total; i++)
    if (g.dealias[i] == 0.0) CHECK(std::sqrt(g.ksq[i]) > cut - 1e-12);
}

TEST_CASE("spectral gradient matches the analytic derivative of a mode") {
  Spectral sp(Grid::make(1, 64, 10.0));
  const Grid& g = sp.grid();
  Field f(g.total);
  double k = 2.0 * M_PI * 3 / g.L;
  for (std::size_t i = 0; i < g.total; i++) f[i] = std::sin(k * g.coord(i, 0));
  CField hat;
  sp.forward(f, hat);
  Field df;
  sp.gradient(hat, 0, df);
  for (std::size_t i = 0; i < g.total; i++)
    CHECK(df[i] == doctest::Approx(k * std::cos(k * g.coord(i, 0))).epsilon(1e-10));
}

TEST_CASE("init_state: zero data, reduced z closed form, history quadrature") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 128, 50.0));
  MediumParams p = critical();
  MemoryKernel k = mem_half();

  InitialData zero;
  StateField zs = init_state(sp, zero, p, k, MemoryRepr::ReducedZ);
  for (double x : zs.psi) CHECK(x == 0.0);
  for (double x : zs.z) CHECK(x == 0.0);

  InitialData sine;
  sine.psi0.kind = ProfileSpec::Kind::FourierMode;
  sine.psi0.amplitude = 1.0;
  sine.psi0.mode = {1};
  StateField st = init_state(sp, sine, p, k, MemoryRepr::ReducedZ);
  for (std::size_t i = 0; i < st.psi.size(); i++)
    CHECK(st.z[i] == doctest::Approx(0.5 * st.psi[i]).epsilon(1e-14));

  InitialData gauss;
  gauss.psi0.kind = ProfileSpec::Kind::GaussianBump;
  gauss.psi0.amplitude = 1.0;
  gauss.psi0.width = 2.0;
  StateField hs = init_state(sp, gauss, p, k, MemoryRepr::History, 0.02, 25.0);
  CHECK(hs.eta.n_r == 1250);
  Field z = reduce_history(hs, p, k);
  Field expect = hs.psi;
  for (double& x : expect) x *= 0.5;  // c^2 - c_g^2
  CHECK(rel_l2_diff(z, expect) < 1e-8);
}

TEST_CASE("reduced z requires exponential kernel") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 16, 5.0));
  MemoryKernel tab = MemoryKernel::tabulated({0.0, 1.0, 2.0}, {0.3, 0.1, 0.0});
  InitialData data;
  CHECK_THROWS_AS(init_state(sp, data, critical(), tab, MemoryRepr::ReducedZ), ConfigError);
}

TEST_CASE("advance_history: pure shift and linear ramp") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 16, 5.0));
  MediumParams p = critical();
  MemoryKernel k = mem_half();
  const double dt = 0.125;

  InitialData gauss;
  gauss.psi0.kind = ProfileSpec::Kind::GaussianBump;
  gauss.psi0.amplitude = 1.0;
  StateField st = init_state(sp, gauss, p, k, MemoryRepr::History, dt, 4.0);
  Field before = st.eta.at_age(3);
  Field zero_v(st.psi.size(), 0.0);
  advance_history(st, zero_v, dt);
  for (std::size_t i = 0; i < before.size(); i++) {
    CHECK(st.eta.at_age(4)[i] == before[i]);  // shifted
    CHECK(st.eta.at_age(0)[i] == 0.0);        // Dafermos boundary
  }

  // constant v = 1 from eta_0 = 0: after k steps eta(r_j) = min(r_j, k dt)
  InitialData zero;
  StateField ramp = init_state(sp, zero, p, k, MemoryRepr::History, dt, 4.0);
  Field ones(ramp.psi.size(), 1.0);
  const int steps = 12;
  for (int s = 0; s < steps; s++) advance_history(ramp, ones, dt);
  for (int j = 0; j <= ramp.eta.n_r; j++) {
    double expect = std::min(j * dt, steps * dt);
    for (double x : ramp.eta.at_age(j)) CHECK(x == doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK_THROWS_AS(advance_history(ramp, ones, 0.5 * dt), ConfigError);
}

TEST_CASE("reduce_history refinement oracle") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 64, 20.0));
  MediumParams p = critical();
  MemoryKernel k = mem_half();
  // random band-limited eta with a smooth age profile, sampled on two grids
  InitialData data;
  data.psi0.kind = ProfileSpec::Kind::BandRandom;
  data.psi0.amplitude = 1.0;
  data.psi0.k_cutoff = 1.5;
  data.seed = 77;
  auto shape = generate_profile(*sp, data.psi0, data.seed, 0);
  auto build = [&](double dr) {
    StateField st = init_state(sp, InitialData{}, p, k, MemoryRepr::History, dr, 25.0);
    for (int j = 1; j <= st.eta.n_r; j++) {
      double r = j * dr;
      double prof = (1.0 - std::exp(-r)) * std::cos(0.3 * r);
      Field& slot = st.eta.at_age(j);
      for (std::size_t i = 0; i < slot.size(); i++) slot[i] = prof * shape[i];
    }
    return st;
  };
  Field coarse = reduce_history(build(0.02), p, k);
  Field fine = reduce_history(build(0.005), p, k);  // 4x age points
  CHECK(rel_l2_diff(coarse, fine) < 1e-6);
}

TEST_CASE("band random profiles are deterministic in the seed") {
  auto sp = std::make_shared<Spectral>(Grid::make(2, 32, 10.0));
  ProfileSpec spec;
  spec.kind = ProfileSpec::Kind::BandRandom;
  spec.amplitude = 1.0;
  spec.k_cutoff = 2.0;
  Field a = generate_profile(*sp, spec, 123, 0);
  Field b = generate_profile(*sp, spec, 123, 0);
  Field c = generate_profile(*sp, spec, 124, 0);
  double diff_same = 0, diff_other = 0;
  for (std::size_t i = 0; i < a.size(); i++) {
    diff_same = std::max(diff_same, std::fabs(a[i] - b[i]));
    diff_other = std::max(diff_other, std::fabs(a[i] - c[i]));
  }
  CHECK(diff_same == 0.0);
  CHECK(diff_other > 1e-6);
}

TEST_CASE("zero-mean band profiles have no k = 0 content") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 64, 30.0));
  ProfileSpec spec;
  spec.kind = ProfileSpec::Kind::BandRandom;
  spec.amplitude = 1.0;
  spec.k_cutoff = 1.0;
  spec.zero_mean = true;
  Field f = generate_profile(*sp, spec, 5, 0);
  double mean = 0;
  for (double x : f) mean += x;
  CHECK(std::fabs(mean / f.size()) < 1e-14);
}
