#include "jmgt/medium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "jmgt/common.hpp"

namespace jmgt {

void MediumParams::validate() const {
  if (!(tau > 0) || !(c > 0) || !(b > 0))
    throw ConfigError("medium parameters require tau > 0, c > 0, b > 0");
  if (!std::isfinite(tau) || !std::isfinite(c) || !std::isfinite(b) || !std::isfinite(k))
    throw ConfigError("medium parameters must be finite");
}

MemoryKernel MemoryKernel::exponential(double m, double tau_g, double /*c*/) {
  MemoryKernel k;
  k.kind = Kind::Exponential;
  k.m = m;
  k.tau_g = tau_g;
  return k;
}

MemoryKernel MemoryKernel::tabulated(std::vector<double> r, std::vector<double> g) {
  MemoryKernel k;
  k.kind = Kind::Tabulated;
  k.r_samples = std::move(r);
  k.g_samples = std::move(g);
  return k;
}

MemoryKernel MemoryKernel::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open kernel CSV: " + path);
  std::vector<double> r, g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double rv, gv;
    if (!(ls >> rv >> gv)) throw ConfigError("malformed kernel CSV row: " + line);
    r.push_back(rv);
    g.push_back(gv);
  }
  return tabulated(std::move(r), std::move(g));
}

namespace {

// Fritsch-Carlson monotone cubic tangents: never overshoots, so a nonnegative
// sample set interpolates to a nonnegative curve.
std::vector<double> fc_tangents(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  std::vector<double> d(n - 1), t(n);
  for (std::size_t i = 0; i + 1 < n; i++) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  t[0] = d[0];
  t[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; i++)
    t[i] = (d[i - 1] * d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  for (std::size_t i = 0; i + 1 < n; i++) {
    if (d[i] == 0) {
      t[i] = t[i + 1] = 0;
      continue;
    }
    double a = t[i] / d[i], b = t[i + 1] / d[i];
    double s = a * a + b * b;
    if (s > 9.0) {
      double f = 3.0 / std::sqrt(s);
      t[i] = f * a * d[i];
      t[i + 1] = f * b * d[i];
    }
  }
  return t;
}

struct CubicEval {
  double value, deriv;
};

CubicEval eval_hermite(double x, double x0, double x1, double y0, double y1, double t0, double t1) {
  double h = x1 - x0, s = (x - x0) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  double dh00 = (6 * s2 - 6 * s) / h, dh10 = (3 * s2 - 4 * s + 1) / h;
  double dh01 = (-6 * s2 + 6 * s) / h, dh11 = (3 * s2 - 2 * s) / h;
  return {h00 * y0 + h10 * h * t0 + h01 * y1 + h11 * h * t1,
          dh00 * y0 + dh10 * h * t0 + dh01 * y1 + dh11 * h * t1};
}

}  // namespace

void MemoryKernel::ensure_tangents() const {
  if (tangents_.empty() && r_samples.size() >= 2) tangents_ = fc_tangents(r_samples, g_samples);
}

double MemoryKernel::g(double r, const MediumParams& p) const {
  if (kind == Kind::Exponential) return m * p.c * p.c * std::exp(-r / tau_g);
  ensure_tangents();
  if (r <= r_samples.front()) return g_samples.front();
  if (r >= r_samples.back()) return 0.0;
  auto it = std::upper_bound(r_samples.begin(), r_samples.end(), r);
  std::size_t i = static_cast<std::size_t>(it - r_samples.begin()) - 1;
  return eval_hermite(r, r_samples[i], r_samples[i + 1], g_samples[i], g_samples[i + 1],
                      tangents_[i], tangents_[i + 1])
      .value;
}

double MemoryKernel::g_prime(double r, const MediumParams& p) const {
  if (kind == Kind::Exponential) return -g(r, p) / tau_g;
  ensure_tangents();
  if (r <= r_samples.front()) return tangents_.empty() ? 0.0 : tangents_.front();
  if (r >= r_samples.back()) return 0.0;
  auto it = std::upper_bound(r_samples.begin(), r_samples.end(), r);
  std::size_t i = static_cast<std::size_t>(it - r_samples.begin()) - 1;
  return eval_hermite(r, r_samples[i], r_samples[i + 1], g_samples[i], g_samples[i + 1],
                      tangents_[i], tangents_[i + 1])
      .deriv;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double MemoryKernel::integral(const MediumParams& p) const {
  if (kind == Kind::Exponential) return m * p.c * p.c * tau_g;
  double a = r_samples.front(), b = r_samples.back();
  double scale = std::max(1e-300, std::fabs(g_samples.front()) * (b - a));
  return integrate([&](double r) { return g(r, p); }, a, b, 1e-13 * scale);
}

KernelReport validate_assumptions(const MemoryKernel& kernel, const MediumParams& params) {
  params.validate();
  KernelReport rep;
  if (kernel.kind == MemoryKernel::Kind::Exponential) {
    if (!(kernel.tau_g > 0)) throw ConfigError("invalid kernel: tau_g must be positive");
    if (kernel.m < 0) throw ConfigError("invalid kernel: m must be nonnegative");
    // All four assumptions are closed-form for g = m c^2 exp(-r/tau_g).
    rep.g1 = {true, 0.0, "g in W^{1,1}, g' continuous (closed form)"};
    double intg = kernel.integral(params);
    bool g2 = intg < params.c * params.c;
    rep.g2 = {g2, 0.0,
              g2 ? "g >= 0 and int g < c^2" : "int g = m c^2 tau_g >= c^2"};
    rep.g3 = {true, 0.0, "g' = -g/tau_g exactly"};
    rep.g4 = {true, 0.0, "g'' = g/tau_g^2 >= 0 exactly"};
    rep.zeta_best = 1.0 / kernel.tau_g;
    rep.c_g_sq = params.c * params.c - intg;
    return rep;
  }

  const auto& r = kernel.r_samples;
  const auto& gs = kernel.g_samples;
  if (r.size() < 3) throw ConfigError("insufficient data: tabulated kernel needs >= 3 samples");
  if (r.size() != gs.size()) throw ConfigError("tabulated kernel: r/g size mismatch");
  for (std::size_t i = 0; i + 1 < r.size(); i++)
    if (!(r[i] < r[i + 1])) throw ConfigError("tabulated kernel: r samples must strictly increase");

  auto probe_grid = [&](int per_interval) {
    std::vector<double> probes;
    for (std::size_t i = 0; i + 1 < r.size(); i++)
      for (int q = 0; q < per_interval; q++)
        probes.push_back(r[i] + (r[i + 1] - r[i]) * q / per_interval);
    probes.push_back(r.back());
    return probes;
  };
  std::vector<double> probes = probe_grid(8);

  // G1: finite difference quotients (a.e. continuity is not decidable from
  // samples, so only finiteness is checked).
  rep.g1 = {true, 0.0, "difference quotients finite"};
  for (std::size_t i = 0; i + 1 < r.size(); i++) {
    double q = (gs[i + 1] - gs[i]) / (r[i + 1] - r[i]);
    if (!std::isfinite(q)) {
      rep.g1 = {false, r[i], "non-finite difference quotient"};
      break;
    }
  }

  // G2: nonnegativity on the probe grid and int g < c^2.
  rep.g2 = {true, 0.0, "g >= 0 and int g < c^2"};
  for (double x : probes) {
    if (kernel.g(x, params) < 0) {
      rep.g2 = {false, x, "g < 0 at probe point"};
      break;
    }
  }
  double intg = kernel.integral(params);
  if (rep.g2.pass && !(intg < params.c * params.c))
    rep.g2 = {false, 0.0, "int g >= c^2"};
  rep.c_g_sq = params.c * params.c - intg;

  // G3: zeta_best = inf over probes of -g'/g; the inf has to be bounded away
  // from zero, which on samples means stable under probe refinement.
  auto zeta_on = [&](const std::vector<double>& grid, double* where) {
    double best = std::numeric_limits<double>::infinity();
    for (double x : grid) {
      double gv = kernel.g(x, params);
      if (gv <= 0) continue;
      double ratio = -kernel.g_prime(x, params) / gv;
      if (ratio < best) {
        best = ratio;
        if (where) *where = x;
      }
    }
    return std::isfinite(best) ? std::max(0.0, best) : 0.0;
  };
  double worst_r = 0.0;
  rep.zeta_best = zeta_on(probes, &worst_r);
  bool g3 = rep.zeta_best > 1e-12 && zeta_on(probe_grid(16), nullptr) > 0.75 * rep.zeta_best;
  if (g3 && worst_r <= r[1]) {
    // the inf sits at the left edge; if the ratio keeps shrinking toward
    // r = 0 (like -g'/g -> 0 for gaussian-type kernels), no positive zeta
    // survives the limit
    auto ratio_at = [&](double x) {
      double gv = kernel.g(x, params);
      return gv > 0 ? -kernel.g_prime(x, params) / gv : 0.0;
    };
    double ra = r[1];
    double rb = std::min(2.0 * ra, r.back());
    if (rb > ra && ratio_at(ra) < 0.6 * ratio_at(rb)) g3 = false;
  }
  rep.g3 = {g3, worst_r,
            g3 ? "g' <= -zeta g on probe grid"
               : "no positive zeta admissible (inf -g'/g collapses toward r = 0)"};

  // G4: second difference quotients nonnegative up to roundoff.
  rep.g4 = {true, 0.0, "second difference quotients >= 0"};
  double scale = std::fabs(gs.front());
  for (std::size_t i = 1; i + 1 < r.size(); i++) {
    double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    double d2 = 2 * (gs[i - 1] * h2 - gs[i] * (h1 + h2) + gs[i + 1] * h1) / (h1 * h2 * (h1 + h2));
    if (d2 < -1e-9 * scale) {
      rep.g4 = {false, r[i], "negative second difference quotient"};
      break;
    }
  }
  return rep;
}

double effective_speed_sq(const MemoryKernel& kernel, const MediumParams& params) {
  params.validate();
  double intg = kernel.integral(params);
  double cg2 = params.c * params.c - intg;
  if (!(cg2 > 0))
    throw std::domain_error("effective_speed_sq: int g >= c^2 (G2 violated)");
  return cg2;
}

RegimeReport classify_regime(const MediumParams& params, const MemoryKernel& /*kernel*/) {
  params.validate();
  RegimeReport rr;
  rr.delta = params.delta();
  rr.chi = params.chi();
  double ref = params.tau * params.c * params.c;
  if (std::fabs(rr.delta) <= kCriticalTolRel * ref)
    rr.regime = Regime::Critical;
  else if (rr.delta > 0)
    rr.regime = Regime::Subcritical;
  else
    rr.regime = Regime::SupercriticalChiNegative;
  return rr;
}

}  // namespace jmgt
