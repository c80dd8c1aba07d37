#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "jmgt/common.hpp"
#include "jmgt/medium.hpp"

using namespace jmgt;

namespace {

// test-side adaptive quadrature, independent of the library path
double quad(const std::function<double(double)>& f, double a, double b, int n = 1 << 16) {
  double h = (b - a) / n, acc = f(a) + f(b);
  for (int i = 1; i < n; i++) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

MediumParams unit_params() { return {1.0, 1.0, 1.0, 0.0, 1.0}; }

}  // namespace

TEST_CASE("exponential kernel satisfies G1-G4 with zeta_best = 1/tau_g") {
  MediumParams p = unit_params();
  MemoryKernel k = MemoryKernel::exponential(0.5, 1.0, p.c);
  KernelReport rep = validate_assumptions(k, p);
  CHECK(rep.all_pass());
  CHECK(rep.zeta_best == 1.0);
  CHECK(rep.c_g_sq == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("G2 fails when int g >= c^2") {
  MediumParams p = unit_params();
  MemoryKernel k = MemoryKernel::exponential(2.0, 1.0, p.c);
  KernelReport rep = validate_assumptions(k, p);
  CHECK_FALSE(rep.g2.pass);
  CHECK(rep.g1.pass);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("tabulated gaussian kernel fails G3") {
  MediumParams p = unit_params();
  std::vector<double> r, g;
  for (int i = 0; i <= 200; i++) {
    double x = 10.0 * i / 200.0;
    r.push_back(x);
    g.push_back(std::exp(-x * x));
  }
  MemoryKernel k = MemoryKernel::tabulated(r, g);
  KernelReport rep = validate_assumptions(k, p);
  CHECK_FALSE(rep.g3.pass);
  CHECK(rep.zeta_best < 0.1);  // -g'/g -> 0 near r = 0, collapses under refinement
  CHECK(rep.g2.pass);
  CHECK_FALSE(rep.g4.pass);  // g'' = (4r^2 - 2) e^{-r^2} < 0 near 0
}

TEST_CASE("tabulated kernel argument checks") {
  MediumParams p = unit_params();
  CHECK_THROWS_AS(validate_assumptions(MemoryKernel::tabulated({0.0, 1.0}, {1.0, 0.5}), p),
                  ConfigError);
  CHECK_THROWS_AS(
      validate_assumptions(MemoryKernel::tabulated({0.0, 1.0, 0.5}, {1.0, 0.5, 0.7}), p),
      ConfigError);
  CHECK_THROWS_AS(validate_assumptions(MemoryKernel::exponential(0.5, -1.0, 1.0), p),
                  ConfigError);
}

TEST_CASE("effective speed squared") {
  MediumParams p = unit_params();
  CHECK(effective_speed_sq(MemoryKernel::exponential(0.5, 1.0, 1.0), p) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(effective_speed_sq(MemoryKernel::exponential(0.0, 1.0, 1.0), p) ==
        doctest::Approx(1.0).epsilon(1e-15));

  MediumParams fast{1.0, 340.0, 340.0 * 340.0, 0.0, 1.0};
  MemoryKernel k = MemoryKernel::exponential(0.1, 0.01, fast.c);
  double closed = fast.c * fast.c * (1.0 - 0.001);
  double lib = effective_speed_sq(k, fast);
  CHECK(lib == doctest::Approx(closed).epsilon(1e-13));
  // independent quadrature of the analytic kernel
  double intg = quad([&](double r) { return 0.1 * fast.c * fast.c * std::exp(-r / 0.01); }, 0.0,
                     0.4);
  CHECK(fast.c * fast.c - intg == doctest::Approx(lib).epsilon(1e-12));

  CHECK_THROWS_AS(effective_speed_sq(MemoryKernel::exponential(2.0, 1.0, 1.0), p),
                  std::domain_error);
}

TEST_CASE("regime classification") {
  MemoryKernel k = MemoryKernel::exponential(0.5, 1.0, 1.0);
  {
    RegimeReport r = classify_regime({1.0, 1.0, 1.0, 0.0, 1.0}, k);
    CHECK(r.regime == Regime::Critical);
    CHECK(r.chi == doctest::Approx(0.0));
  }
  {
    RegimeReport r = classify_regime({1.0, 1.0, 1.5, 0.0, 1.0}, k);
    CHECK(r.regime == Regime::Subcritical);
    CHECK(r.chi == doctest::Approx(1.0 / 3.0));
  }
  {
    RegimeReport r = classify_regime({1.0, 2.0, 1.0, 0.0, 1.0}, k);
    CHECK(r.regime == Regime::SupercriticalChiNegative);
    CHECK(r.chi == doctest::Approx(-3.0));
  }
}

TEST_CASE("property: zeta_best * tau_g = 1 exactly for exponential kernels") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.05, 3.0);
  MediumParams p = unit_params();
  for (int i = 0; i < 50; i++) {
    double tau_g = dist(rng);
    double m = 0.2 * dist(rng);
    MemoryKernel k = MemoryKernel::exponential(m, tau_g, p.c);
    KernelReport rep = validate_assumptions(k, p);
    CHECK(rep.zeta_best * tau_g == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("property: effective speed decreasing in m") {
  MediumParams p = unit_params();
  double prev = 1e300;
  for (double m : {0.0, 0.1, 0.3, 0.6, 0.9}) {
    double cg2 = effective_speed_sq(MemoryKernel::exponential(m, 1.0, 1.0), p);
    CHECK(cg2 < prev);
    prev = cg2;
  }
}

TEST_CASE("property: classification depends only on the sign of b - tau c^2") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.1, 4.0);
  MemoryKernel k = MemoryKernel::exponential(0.1, 1.0, 1.0);
  for (int i = 0; i < 100; i++) {
    MediumParams p{dist(rng), dist(rng), dist(rng), 0.0, 1.0};
    RegimeReport r = classify_regime(p, k);
    double delta = p.b - p.tau * p.c * p.c;
    if (r.regime == Regime::Subcritical) CHECK(delta > 0);
    if (r.regime == Regime::SupercriticalChiNegative) CHECK(delta < 0);
    if (r.regime == Regime::Critical)
      CHECK(std::fabs(delta) <= kCriticalTolRel * p.tau * p.c * p.c);
  }
}

TEST_CASE("tabulated exponential kernel matches closed forms on the probe grid") {
  MediumParams p = unit_params();
  std::vector<double> r, g;
  for (int i = 0; i <= 400; i++) {
    double x = 30.0 * i / 400.0;
    r.push_back(x);
    g.push_back(0.5 * std::exp(-x));
  }
  MemoryKernel k = MemoryKernel::tabulated(r, g);
  KernelReport rep = validate_assumptions(k, p);
  CHECK(rep.all_pass());
  CHECK(rep.zeta_best == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(rep.c_g_sq == doctest::Approx(0.5).epsilon(1e-4));
}
