#include "jmgt/appendix.hpp"

#include <cmath>
#include <functional>

#include "jmgt/common.hpp"
#include "jmgt/grid.hpp"
#include "jmgt/state.hpp"

namespace jmgt {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 44);
}

// sup over log-spaced t of weight(t) * int_0^t kernel(t,s) ds; the integrand
// peaks at both endpoints, so the range is split at t/2 and integrated
// adaptively on each half.
double sup_weighted_convolution(const std::function<double(double, double)>& kernel,
                                const std::function<double(double)>& weight, double t_hi) {
  double sup = 0.0;
  for (int i = 0; i <= 60; i++) {
    double t = std::pow(10.0, 4.0 * i / 60.0) * (t_hi / 1e4);
    auto f = [&](double s) { return kernel(t, s); };
    double tol = 1e-10 * std::max(1.0, kernel(t, t) + kernel(t, 0.0));
    double integral = integrate(f, 0.0, 0.5 * t, tol) + integrate(f, 0.5 * t, t, tol);
    sup = std::max(sup, weight(t) * integral);
  }
  return sup;
}

}  // namespace

double strauss_iteration_sup(double c1, double c2, double kappa, int iterations) {
  double m = c1, sup = m;
  for (int i = 0; i < iterations; i++) {
    m = c1 + c2 * std::pow(m, kappa);
    sup = std::max(sup, m);
    if (!std::isfinite(m)) break;
  }
  return sup;
}

AppendixReport verify_appendix_inequalities(std::uint64_t seed) {
  AppendixReport rep;

  // (i) (1+t-s)^-a (1+s)^-b convolution bounded by (1+t)^-min(a,b), max(a,b) > 1
  for (auto [a, b] : {std::pair{2.0, 0.8}, {1.5, 1.5}, {0.7, 2.0}}) {
    double mn = std::min(a, b);
    auto kern = [a, b](double t, double s) {
      return std::pow(1.0 + t - s, -a) * std::pow(1.0 + s, -b);
    };
    auto wt = [mn](double t) { return std::pow(1.0 + t, mn); };
    AppendixCheck c;
    c.name = "segel_convolution a=" + std::to_string(a) + " b=" + std::to_string(b);
    c.measured = sup_weighted_convolution(kern, wt, 1e4);
    c.refined = sup_weighted_convolution(kern, wt, 2e4);
    c.stable = c.refined <= 1.05 * c.measured + 1e-12;
    c.pass = std::isfinite(c.measured) && c.stable;
    rep.checks.push_back(c);
  }

  // (ii) exponential convolution against (1+s)^-beta keeps the power
  {
    double gamma = 1.0, beta = 2.0;
    auto kern = [gamma, beta](double t, double s) {
      return std::exp(-gamma * (t - s)) * std::pow(1.0 + s, -beta);
    };
    auto wt = [beta](double t) { return std::pow(1.0 + t, beta); };
    AppendixCheck c;
    c.name = "exponential_convolution gamma=1 beta=2";
    c.measured = sup_weighted_convolution(kern, wt, 1e4);
    c.refined = sup_weighted_convolution(kern, wt, 2e4);
    c.stable = c.refined <= 1.05 * c.measured + 1e-12;
    c.pass = std::isfinite(c.measured) && c.stable;
    rep.checks.push_back(c);
  }

  // (iii) int_0^1 r^{n-1} e^{-r^2 t} dr <= C(n) (1+t)^{-n/2}
  for (int n = 1; n <= 3; n++) {
    auto sup_for = [&](double t_hi) {
      double sup = 0.0;
      for (int i = 0; i <= 60; i++) {
        double t = std::pow(10.0, 6.0 * i / 60.0) * (t_hi / 1e6);
        auto f = [&](double r) { return std::pow(r, n - 1) * std::exp(-r * r * t); };
        sup = std::max(sup, std::pow(1.0 + t, 0.5 * n) * integrate(f, 0.0, 1.0, 1e-12));
      }
      return sup;
    };
    AppendixCheck c;
    c.name = "radial_heat_moment n=" + std::to_string(n);
    c.measured = sup_for(1e6);
    c.refined = sup_for(1e7);
    c.stable = c.refined <= 1.05 * c.measured + 1e-12;
    c.pass = std::isfinite(c.measured) && c.stable;
    rep.checks.push_back(c);
  }

  // (iv) scalar bootstrap: C1=0.1, C2=1, kappa=2 satisfies the smallness
  // condition; the iterates must stay below C1/(1-1/kappa) = 0.2
  {
    AppendixCheck c;
    c.name = "strauss_bootstrap";
    double c1 = 0.1, c2 = 1.0, kappa = 2.0;
    double cond_lhs = c1 * std::pow(c2, 1.0 / (kappa - 1.0));
    double cond_rhs = (1.0 - 1.0 / kappa) * std::pow(kappa, -1.0 / (kappa - 1.0));
    c.measured = strauss_iteration_sup(c1, c2, kappa, 1000);
    c.refined = strauss_iteration_sup(c1, c2, kappa, 10000);
    c.stable = std::fabs(c.refined - c.measured) <= 1e-12;
    double bound = c1 / (1.0 - 1.0 / kappa);
    c.pass = cond_lhs < cond_rhs && c.measured < bound && c.stable;
    c.detail = "bound " + std::to_string(bound);
    rep.checks.push_back(c);
  }

  // (v) commutator estimate on random band-limited pairs
  {
    auto max_ratio = [&](int N) {
      auto sp = std::make_shared<Spectral>(Grid::make(1, N, 2.0 * M_PI));
      const Grid& g = sp->grid();
      double worst = 0.0;
      for (int trial = 0; trial < 50; trial++) {
        ProfileSpec ps;
        ps.kind = ProfileSpec::Kind::BandRandom;
        ps.amplitude = 1.0;
        ps.k_cutoff = N / 8.0;
        Field f = generate_profile(*sp, ps, seed + 17 * trial, 0);
        Field h = generate_profile(*sp, ps, seed + 17 * trial + 7, 1);
        CField fh, hh;
        sp->forward(f, fh);
        sp->forward(h, hh);
        for (int k = 1; k <= 3; k++) {
          // [grad^k, f] h = grad^k(f h) - f grad^k h  (1-d, spectral powers)
          Field fh_real(g.total);
          for (std::size_t i = 0; i < g.total; i++) fh_real[i] = f[i] * h[i];
          CField prod_hat;
          sp->forward(fh_real, prod_hat);
          auto dk = [&](CField& spec, int order) {
            for (std::size_t i = 0; i < g.total; i++) {
              std::complex<double> ik(0.0, g.kcomp[0][i]);
              std::complex<double> m = 1.0;
              for (int q = 0; q < order; q++) m *= ik;
              spec[i] *= m;
            }
          };
          CField t1 = prod_hat;
          dk(t1, k);
          CField t2 = hh;
          dk(t2, k);
          Field t2r;
          sp->backward(t2, t2r);
          Field comm;
          sp->backward(t1, comm);
          for (std::size_t i = 0; i < g.total; i++) comm[i] -= f[i] * t2r[i];
          auto l2 = [&](const Field& x) {
            double acc = 0;
            for (double v : x) acc += v * v;
            return std::sqrt(acc * g.cell_volume());
          };
          auto linf = [&](const Field& x) {
            double m2 = 0;
            for (double v : x) m2 = std::max(m2, std::fabs(v));
            return m2;
          };
          CField gf = fh;
          dk(gf, 1);
          Field gf_r;
          sp->backward(gf, gf_r);
          CField gk1h = hh;
          dk(gk1h, k - 1);
          Field gk1h_r;
          sp->backward(gk1h, gk1h_r);
          CField gkf = fh;
          dk(gkf, k);
          Field gkf_r;
          sp->backward(gkf, gkf_r);
          double denom = linf(gf_r) * l2(gk1h_r) + linf(h) * l2(gkf_r);
          if (denom > 0) worst = std::max(worst, l2(comm) / denom);
        }
      }
      return worst;
    };
    AppendixCheck c;
    c.name = "commutator_estimate";
    c.measured = max_ratio(128);
    c.refined = max_ratio(256);
    c.stable = c.refined <= 2.0 * c.measured + 1e-12;
    c.pass = std::isfinite(c.measured) && c.measured > 0 && c.stable;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace jmgt
