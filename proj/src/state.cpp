#include "jmgt/state.hpp"

#include <cmath>

#include "jmgt/simd/kernels.hpp"

namespace jmgt {

void HistoryField::init(int n_r_, double dr_, std::size_t field_size_) {
  n_r = n_r_;
  dr = dr_;
  field_size = field_size_;
  head = 0;
  horizon = 0;
  slots.assign(n_r + 1, Field(field_size, 0.0));
  jump.clear();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hermitian-symmetric random-phase spectrum with declared modulus profile.
// Phases are hashed from the canonical mode index, so the field is a pure
// function of (seed, grid, profile) regardless of evaluation order.
Field band_random(const Spectral& sp, const ProfileSpec& spec, std::uint64_t seed) {
  const Grid& g = sp.grid();
  CField spec_field(g.total, {0.0, 0.0});
  const int N = g.N;
  auto decode = [&](std::size_t idx, int* m) {
    std::size_t rem = idx;
    for (int d = g.n - 1; d >= 0; d--) {
      int i = static_cast<int>(rem % N);
      rem /= N;
      m[d] = i;
    }
  };
  auto encode = [&](const int* m) {
    std::size_t idx = 0;
    for (int d = 0; d < g.n; d++) idx = idx * N + static_cast<std::size_t>(m[d]);
    return idx;
  };
  for (std::size_t idx = 0; idx < g.total; idx++) {
    if (g.dealias[idx] == 0.0) continue;
    int m[3] = {0, 0, 0};
    decode(idx, m);
    int mm[3];
    bool self = true;
    for (int d = 0; d < g.n; d++) {
      mm[d] = (N - m[d]) % N;
      if (mm[d] != m[d]) self = false;
    }
    std::size_t mirror = encode(mm);
    if (mirror < idx) continue;  // handled from the canonical side
    double kmag = std::sqrt(g.ksq[idx]);
    if (kmag == 0.0 && spec.zero_mean) continue;
    double mod = spec.amplitude * std::exp(-(kmag / spec.k_cutoff) * (kmag / spec.k_cutoff));
    if (self) {
      double sign = (splitmix64(seed ^ idx) & 1) ? 1.0 : -1.0;
      spec_field[idx] = {kmag == 0.0 ? mod : sign * mod, 0.0};
    } else {
      double phase = 2.0 * M_PI *
                     (static_cast<double>(splitmix64(seed ^ idx) >> 11) * 0x1.0p-53);
      spec_field[idx] = std::polar(mod, phase);
      spec_field[mirror] = std::conj(spec_field[idx]);
    }
  }
  Field out;
  sp.backward(spec_field, out);
  return out;
}

}  // namespace

Field generate_profile(const Spectral& sp, const ProfileSpec& spec, std::uint64_t seed,
                       int component_tag) {
  const Grid& g = sp.grid();
  Field f(g.total, 0.0);
  switch (spec.kind) {
    case ProfileSpec::Kind::Zero:
      break;
    case ProfileSpec::Kind::GaussianBump: {
      for (std::size_t i = 0; i < g.total; i++) {
        double r2 = 0.0;
        for (int d = 0; d < g.n; d++) {
          double dx = g.coord(i, d) - 0.5 * g.L;
          r2 += dx * dx;
        }
        f[i] = spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
      }
      break;
    }
    case ProfileSpec::Kind::FourierMode: {
      for (std::size_t i = 0; i < g.total; i++) {
        double phase = 0.0;
        for (int d = 0; d < g.n; d++) {
          int m = d < static_cast<int>(spec.mode.size()) ? spec.mode[d] : 0;
          phase += 2.0 * M_PI * m * g.coord(i, d) / g.L;
        }
        f[i] = spec.amplitude * std::sin(phase);
      }
      break;
    }
    case ProfileSpec::Kind::BandRandom:
      f = band_random(sp, spec, splitmix64(seed) ^ (0x51ed2701ULL * (component_tag + 1)));
      break;
  }
  if (spec.zero_mean && !f.empty()) {
    double mean = 0.0;
    for (double x : f) mean += x;
    mean /= static_cast<double>(f.size());
    for (double& x : f) x -= mean;
  }
  return f;
}

StateField init_state(SpectralPtr spectral, const InitialData& data, const MediumParams& params,
                      const MemoryKernel& kernel, MemoryRepr repr, std::optional<double> age_dr,
                      double r_max_factor) {
  StateField s;
  s.spectral = std::move(spectral);
  const Spectral& sp = *s.spectral;
  s.psi = generate_profile(sp, data.psi0, data.seed, 0);
  s.v = generate_profile(sp, data.psi1, data.seed, 1);
  s.w = generate_profile(sp, data.psi2, data.seed, 2);
  s.repr = repr;
  s.time = 0.0;

  if (repr == MemoryRepr::ReducedZ) {
    if (!kernel.is_exponential())
      throw ConfigError("unsupported representation: ReducedZ requires an exponential kernel");
    double factor = kernel.integral(params);  // c^2 - c_g^2
    s.z = s.psi;
    simd::active().scale(s.z.size(), factor, s.z.data());
  } else {
    if (!age_dr || !(*age_dr > 0))
      throw ConfigError("History representation needs the age spacing (= dt)");
    double tail_scale = kernel.is_exponential() ? kernel.tau_g : kernel.r_samples.back();
    double r_max = r_max_factor * tail_scale;
    int n_r = static_cast<int>(std::ceil(r_max / *age_dr));
    if (n_r % 2 == 1) n_r++;  // keep the age count even for Simpson-based generators
    s.eta.init(n_r, *age_dr, sp.grid().total);
    for (int j = 1; j <= n_r; j++) s.eta.at_age(j) = s.psi;
    // eta(0, 0+) = psi_0 against eta(0, 0) = 0: record the discontinuity
    bool nonzero = false;
    for (double x : s.psi)
      if (x != 0.0) nonzero = true;
    if (nonzero) s.eta.jump = s.psi;
  }
  return s;
}

void advance_history(StateField& state, const Field& v_mean, double dt) {
  if (state.repr != MemoryRepr::History)
    throw ConfigError("advance_history: state has no history representation");
  HistoryField& h = state.eta;
  if (std::fabs(dt - h.dr) > 1e-12 * std::max(dt, h.dr))
    throw ConfigError("advance_history: dt must equal the age-grid spacing");
  const int slots = h.n_r + 1;
  h.head = (h.head - 1 + slots) % slots;
  h.horizon++;
  Field& fresh = h.at_age(0);
  std::fill(fresh.begin(), fresh.end(), 0.0);
  // source: every positive age gains the increment of psi over the step
  const auto& k = simd::active();
  for (int j = 1; j <= h.n_r; j++) k.axpy(h.field_size, dt, v_mean.data(), h.at_age(j).data());
}

namespace {

// End-corrected trapezoid weights for int_{r_first}^{r_last} w(r) f(r) dr on
// nodes first..last (Euler-Maclaurin endpoint terms from one-sided
// second-order difference estimates of (w f)'; plain trapezoid when the
// piece has fewer than 3 intervals).
void corrected_trapezoid(std::vector<double>& w, int first, int last, double dr,
                         const std::function<double(double)>& wfun) {
  if (last <= first) return;
  for (int j = first; j <= last; j++) {
    double q = (j == first || j == last) ? 0.5 * dr : dr;
    w[j] += q * wfun(j * dr);
  }
  if (last - first < 3) return;
  double c = dr / 24.0;
  w[first] += c * (-3.0 * wfun(first * dr));
  w[first + 1] += c * (4.0 * wfun((first + 1) * dr));
  w[first + 2] += c * (-1.0 * wfun((first + 2) * dr));
  w[last] -= c * (3.0 * wfun(last * dr));
  w[last - 1] -= c * (-4.0 * wfun((last - 1) * dr));
  w[last - 2] -= c * (1.0 * wfun((last - 2) * dr));
}

}  // namespace

std::vector<double> age_quadrature_weights(int n_r, double dr, const MediumParams& params,
                                           const MemoryKernel& kernel,
                                           bool negative_g_prime_weight) {
  auto wfun = [&](double r) {
    return negative_g_prime_weight ? -kernel.g_prime(r, params) : kernel.g(r, params);
  };
  std::vector<double> w(n_r + 1, 0.0);
  corrected_trapezoid(w, 0, n_r, dr, wfun);
  if (kernel.is_exponential()) {
    // int_{r_max}^inf of the weight, with eta frozen at its r_max value
    double r_max = n_r * dr;
    w[n_r] += negative_g_prime_weight ? kernel.g(r_max, params)
                                      : kernel.g(r_max, params) * kernel.tau_g;
  }
  return w;
}

std::vector<double> split_age_weights(int n_r, double dr, const MediumParams& params,
                                      const MemoryKernel& kernel, bool negative_g_prime_weight,
                                      int j_h, std::vector<double>* b_out) {
  auto wfun = [&](double r) {
    return negative_g_prime_weight ? -kernel.g_prime(r, params) : kernel.g(r, params);
  };
  // piece A on [0, r_jh] uses stored (left-limit) values; piece B on
  // [r_jh, r_max] belongs to the right branch, so its horizon-node weight is
  // split off into b_out for application to (stored + jump).
  std::vector<double> w(n_r + 1, 0.0);
  corrected_trapezoid(w, 0, j_h, dr, wfun);
  std::vector<double> wb(n_r + 1, 0.0);
  corrected_trapezoid(wb, j_h, n_r, dr, wfun);
  if (kernel.is_exponential()) {
    double r_max = n_r * dr;
    wb[n_r] += negative_g_prime_weight ? kernel.g(r_max, params)
                                       : kernel.g(r_max, params) * kernel.tau_g;
  }
  if (b_out) {
    b_out->assign(n_r + 1, 0.0);
    (*b_out)[j_h] = wb[j_h];
  }
  for (int j = 0; j <= n_r; j++)
    if (j != j_h) w[j] += wb[j];
  return w;
}

Field reduce_history(const StateField& state, const MediumParams& params,
                     const MemoryKernel& kernel) {
  if (state.repr != MemoryRepr::History)
    throw ConfigError("reduce_history: state has no history representation");
  const HistoryField& h = state.eta;
  const auto& k = simd::active();
  Field z(h.field_size, 0.0);

  const int j_h = h.horizon;
  const bool split = !h.jump.empty() && j_h < h.n_r - 2;
  if (!split) {
    std::vector<double> w = age_quadrature_weights(h.n_r, h.dr, params, kernel, false);
    for (int j = 1; j <= h.n_r; j++) k.axpy(h.field_size, w[j], h.at_age(j).data(), z.data());
    return z;
  }

  std::vector<double> wb;
  std::vector<double> w = split_age_weights(h.n_r, h.dr, params, kernel, false, j_h, &wb);
  for (int j = 1; j <= h.n_r; j++) k.axpy(h.field_size, w[j], h.at_age(j).data(), z.data());
  // right limit at the horizon node = stored left limit + jump
  if (j_h >= 1) k.axpy(h.field_size, wb[j_h], h.at_age(j_h).data(), z.data());
  k.axpy(h.field_size, wb[j_h], h.jump.data(), z.data());
  return z;
}

}  // namespace jmgt
