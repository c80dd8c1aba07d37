#include "jmgt/mode.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jmgt/common.hpp"
#include "jmgt/linalg.hpp"

namespace jmgt {

ModeSystem assemble_mode_system(const MediumParams& params, const MemoryKernel& kernel,
                                double rho_sq) {
  if (rho_sq < 0) throw std::invalid_argument("assemble_mode_system: rho_sq must be >= 0");
  if (!kernel.is_exponential())
    throw ConfigError("unsupported representation: Reduced requires an exponential kernel");
  ModeSystem sys;
  sys.rho_sq = rho_sq;
  sys.params = params;
  sys.kernel = kernel;
  sys.representation = ModeRepresentation::Reduced;
  const double intg = kernel.integral(params);
  const double cg2 = params.c * params.c - intg;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 0) = -cg2 * rho_sq / params.tau;
  a(2, 1) = -params.b * rho_sq / params.tau;
  a(2, 2) = -1.0 / params.tau;
  a(2, 3) = -rho_sq / params.tau;
  a(3, 1) = intg;  // c^2 - c_g^2
  a(3, 3) = -1.0 / kernel.tau_g;
  sys.generator = a;
  return sys;
}

ModeSystem assemble_mode_system(const MediumParams& params, const MemoryKernel& kernel,
                                double rho_sq, const HistoryGridSpec& spec) {
  if (rho_sq < 0) throw std::invalid_argument("assemble_mode_system: rho_sq must be >= 0");
  if (spec.n_age < 4 || spec.n_age % 2 != 0)
    throw ConfigError("history grid: n_age must be even and >= 4");
  ModeSystem sys;
  sys.rho_sq = rho_sq;
  sys.params = params;
  sys.kernel = kernel;
  sys.representation = ModeRepresentation::HistoryGrid;

  const int nr = spec.n_age;
  const double dr = spec.r_max / nr;
  const double cg2 = params.c * params.c - kernel.integral(params);
  const int dim = 3 + nr;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 0) = -cg2 * rho_sq / params.tau;
  a(2, 1) = -params.b * rho_sq / params.tau;
  a(2, 2) = -1.0 / params.tau;

  auto gv = [&](int j) { return kernel.g(j * dr, params); };
  auto sw = [&](int j) { return std::sqrt(std::max(gv(j), 1e-300)); };

  // memory row: -rho^2/tau * int g eta, composite Simpson over r_0..r_nr
  // (eta_0 = 0 drops out) plus the exponential tail g(r_max) tau_g eta(r_max)
  for (int j = 1; j <= nr; j++) {
    double w = (j == nr) ? dr / 3.0 : ((j % 2 == 1) ? 4.0 * dr / 3.0 : 2.0 * dr / 3.0);
    a(2, 2 + j) -= rho_sq / params.tau * w * gv(j) / sw(j);
  }
  if (kernel.is_exponential())
    a(2, 2 + nr) -= rho_sq / params.tau * gv(nr) * kernel.tau_g / sw(nr);

  // eta_j' = v - eta_r: centered at the first node (ghost eta_0 = 0),
  // second-order upwind inside
  for (int j = 1; j <= nr; j++) {
    int row = 2 + j;
    a(row, 1) = sw(j);
    auto d = [&](int col, double coef) {
      if (col >= 1) a(row, 2 + col) -= coef * sw(j) / sw(col);
    };
    if (j == 1) {
      d(2, 0.5 / dr);
    } else {
      d(j, 1.5 / dr);
      d(j - 1, -2.0 / dr);
      d(j - 2, 0.5 / dr);
    }
  }
  sys.generator = a;
  return sys;
}

std::array<double, 5> reduced_char_poly(const MediumParams& params, const MemoryKernel& kernel,
                                        double rho_sq) {
  const double mu = 1.0 / kernel.tau_g;
  const double cg2 = params.c * params.c - kernel.integral(params);
  return {cg2 * rho_sq * mu, rho_sq * (params.b * mu + params.c * params.c),
          mu + params.b * rho_sq, 1.0 + params.tau * mu, params.tau};
}

StabilityClass routh_hurwitz_no_memory(const MediumParams& params, double rho_sq) {
  params.validate();
  if (!(rho_sq > 0)) throw std::invalid_argument("routh_hurwitz_no_memory: degenerate mode rho = 0");
  // tau L^3 + L^2 + b rho^2 L + c^2 rho^2, all coefficients positive: Hurwitz
  // iff a2 a1 > a3 a0, i.e. b rho^2 > tau c^2 rho^2.
  const double lhs = params.b;
  const double rhs = params.tau * params.c * params.c;
  const double tol = kCriticalTolRel * rhs;
  if (std::fabs(lhs - rhs) <= tol) return StabilityClass::Marginal;
  return lhs > rhs ? StabilityClass::AsymptoticallyStable : StabilityClass::Unstable;
}

SpectrumSample mode_spectrum(const MediumParams& params, const MemoryKernel& kernel, double rho) {
  SpectrumSample s;
  s.rho = rho;
  ModeSystem sys = assemble_mode_system(params, kernel, rho * rho);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.generator, false);
  if (es.info() != Eigen::Success) {
    s.converged = false;
    return s;
  }
  s.eigenvalues.resize(4);
  s.abscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; i++) {
    s.eigenvalues[i] = es.eigenvalues()(i);
    s.abscissa = std::max(s.abscissa, s.eigenvalues[i].real());
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return s;
}

namespace {

// Constrained log-log fit of |abscissa| against rho^(2*sign) over the
// outermost decade with at least 5 points.
double asymptotic_coef(const std::vector<SpectrumSample>& samples, bool low_end) {
  std::vector<const SpectrumSample*> ok;
  for (const auto& s : samples)
    if (s.converged && s.abscissa < 0) ok.push_back(&s);
  if (ok.size() < 5) return 0.0;
  double edge = low_end ? ok.front()->rho : ok.back()->rho;
  double fac = 10.0;
  std::vector<const SpectrumSample*> win;
  while (win.size() < 5 && fac < 1e12) {
    win.clear();
    for (auto* s : ok) {
      bool in = low_end ? (s->rho <= edge * fac) : (s->rho >= edge / fac);
      if (in) win.push_back(s);
    }
    fac *= 1.2589254117941673;  // widen by 1/10 decade until populated
  }
  double acc = 0;
  for (auto* s : win) {
    double lr = std::log(s->rho);
    acc += std::log(-s->abscissa) + (low_end ? -2.0 * lr : 2.0 * lr);
  }
  return std::exp(acc / win.size());
}

}  // namespace

AbscissaCurve abscissa_sweep(const MediumParams& params, const MemoryKernel& kernel,
                             const std::vector<double>& rho_grid) {
  if (rho_grid.size() < 20)
    throw std::invalid_argument("abscissa_sweep: need >= 20 grid points");
  for (std::size_t i = 0; i < rho_grid.size(); i++) {
    if (!(rho_grid[i] > 0)) throw std::invalid_argument("abscissa_sweep: grid must be positive");
    if (i > 0 && !(rho_grid[i] > rho_grid[i - 1]))
      throw std::invalid_argument("abscissa_sweep: grid must be sorted ascending");
  }
  if (rho_grid.back() / rho_grid.front() < 1e4)
    throw std::invalid_argument("abscissa_sweep: grid must span >= 4 decades");

  AbscissaCurve curve;
  curve.samples.resize(rho_grid.size());
  parallel_for(rho_grid.size(), [&](std::size_t i) {
    curve.samples[i] = mode_spectrum(params, kernel, rho_grid[i]);
  });
  curve.low_coef = asymptotic_coef(curve.samples, true);
  curve.high_coef = asymptotic_coef(curve.samples, false);
  return curve;
}

Eigen::VectorXd propagate_mode(const ModeSystem& system, const Eigen::VectorXd& state0, double t) {
  if (t < 0) throw std::invalid_argument("propagate_mode: t must be >= 0");
  if (state0.size() != system.generator.rows())
    throw std::invalid_argument("propagate_mode: state dimension mismatch");
  if (t == 0.0) return state0;
  Eigen::VectorXd out = expm(t * system.generator) * state0;
  if (!out.allFinite()) throw std::overflow_error("propagate_mode: non-finite state");
  return out;
}

double reduced_z_init_factor(const MediumParams& params, const MemoryKernel& kernel) {
  return kernel.integral(params);  // c^2 - c_g^2
}

}  // namespace jmgt
