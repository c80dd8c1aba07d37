#include <doctest.h>

#include <cmath>

#include "jmgt/appendix.hpp"
#include "jmgt/common.hpp"
#include "jmgt/decay.hpp"

using namespace jmgt;

namespace {

MediumParams critical() { return {1.0, 1.0, 1.0, 0.0, 1.0}; }
MemoryKernel mem_half() { return MemoryKernel::exponential(0.5, 1.0, 1.0); }

}  // namespace

TEST_CASE("t = 0 norm matches the analytic Gaussian moment") {
  RadialProfile prof;  // psi1 loading, a = 0
  prof.n_dim = 3;
  MediumParams p = critical();
  std::vector<double> t0 = {0.0};
  auto series = radial_norm_evolution(prof, p, mem_half(), 0, t0, ModeComponent::U);
  // |U0|^2 = f^2 (1 + rho^2 (1 + tau^2)), f = exp(-rho^2/2);
  // int rho^(2k) e^(-rho^2) = Gamma(k + 1/2) / 2
  double m2 = 0.5 * std::tgamma(1.5);
  double m4 = 0.5 * std::tgamma(2.5);
  double expect = std::sqrt(4.0 * M_PI * (m2 + (1.0 + p.tau * p.tau) * m4));
  CHECK(series[0] == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("fit_decay on synthetic series") {
  auto times = log_spaced(1.0, 1e4, 60);
  std::vector<double> power(times.size()), expo(times.size()), flat(times.size());
  for (std::size_t i = 0; i < times.size(); i++) {
    power[i] = 2.7 * std::pow(1.0 + times[i], -1.3);
    expo[i] = 5.0 * std::exp(-times[i]);
    flat[i] = 0.42;
  }
  DecayFit f1 = fit_decay(times, power, 1.0, 1e4, -1.3, 0.05);
  CHECK(f1.exponent == doctest::Approx(-1.3).epsilon(1e-6));
  CHECK(f1.pass);
  CHECK(f1.r2 > 0.999999);

  DecayFit f2 = fit_decay(times, expo, 10.0, 100.0);
  CHECK(f2.exponent < -2.0);
  CHECK(f2.r2 < 0.999);  // not a power law

  DecayFit f3 = fit_decay(times, flat, 1.0, 1e4, 0.0, 0.01);
  CHECK(f3.exponent == doctest::Approx(0.0));
  CHECK(f3.pass);

  std::vector<double> bad = power;
  bad[30] = -1.0;
  CHECK_THROWS(fit_decay(times, bad, 1.0, 1e4));
  CHECK_THROWS(fit_decay(times, power, 9000.0, 9500.0));  // < 10 samples
}

TEST_CASE("quadrature convergence gate") {
  RadialProfile prof;
  prof.family = RadialProfile::Family::SobolevLimited;
  prof.beta = 2.6;
  prof.n_dim = 3;
  RadialQuadratureOpts opts;
  opts.panels = 6;  // far too few for the slowly decaying profile
  std::vector<double> times = {0.0, 10.0};
  CHECK_THROWS_AS(
      radial_norm_evolution(prof, critical(), mem_half(), 0, times, ModeComponent::U, opts),
      ResolutionError);
}

TEST_CASE("window extension moves the exponent toward the target") {
  RadialProfile prof;
  prof.n_dim = 3;
  MediumParams p = critical();
  auto times = log_spaced(1e3, 1e4, 31);
  auto series = radial_norm_evolution(prof, p, mem_half(), 0, times, ModeComponent::U);
  DecayFit narrow = fit_decay(times, series, 1e3, 3e3, -0.75, 0.05);
  DecayFit wide = fit_decay(times, series, 1e3, 1e4, -0.75, 0.05);
  CHECK(std::fabs(wide.exponent + 0.75) <= std::fabs(narrow.exponent + 0.75) + 0.002);
  CHECK(wide.pass);
}

TEST_CASE("w and v fits hit their target rates") {
  RadialProfile prof;
  prof.n_dim = 3;
  MediumParams small_tau{0.1, 1.0, 0.1, 0.0, 1.0};  // critical with tau = 0.1
  WvDecayPair pair = w_and_v_decay(prof, small_tau, mem_half(), 0);
  CHECK(pair.w_fit.pass);
  CHECK(pair.w_fit.target == doctest::Approx(-1.25));
  CHECK(pair.v_fit.pass);
  CHECK(pair.v_fit.target == doctest::Approx(-0.75));
}

TEST_CASE("strauss iteration stays under the fixed-point bound") {
  // condition: 0.1 * 1 < 0.25; limit = smaller root of M = 0.1 + M^2
  double sup = strauss_iteration_sup(0.1, 1.0, 2.0, 1000);
  double fixed_point = (1.0 - std::sqrt(0.6)) / 2.0;
  CHECK(sup < 0.2);
  CHECK(sup == doctest::Approx(fixed_point).epsilon(1e-9));
}

TEST_CASE("initial w data only shifts the transient, not the fitted w rate") {
  MediumParams p{0.1, 1.0, 0.1, 0.0, 1.0};
  MemoryKernel k = mem_half();
  auto times = log_spaced(kFitWindowLo, kFitWindowHi, 31);
  RadialProfile base;  // psi2 = 0
  base.n_dim = 3;
  RadialProfile with_w = base;
  with_w.amp2 = 1.0;  // adds |w0|^2 exp(-t/tau) transient content
  auto s0 = radial_norm_evolution(base, p, k, 0, times, ModeComponent::W);
  auto s1 = radial_norm_evolution(with_w, p, k, 0, times, ModeComponent::W);
  DecayFit f0 = fit_decay(times, s0, kFitWindowLo, kFitWindowHi, -1.25, 0.05);
  DecayFit f1 = fit_decay(times, s1, kFitWindowLo, kFitWindowHi, -1.25, 0.05);
  CHECK(f0.pass);
  CHECK(f1.pass);
  CHECK(f0.exponent == doctest::Approx(f1.exponent).epsilon(0.01));
}
