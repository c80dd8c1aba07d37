#include "jmgt/solver.hpp"

#include <cmath>
#include <map>

#include "jmgt/linalg.hpp"
#include "jmgt/simd/kernels.hpp"

namespace jmgt {

void SolverConfig::validate(const MediumParams& params) const {
  if (!(dt > 0)) throw ConfigError("solver: dt must be positive");
  if (!(t_end >= 0)) throw ConfigError("solver: t_end must be nonnegative");
  if (snapshot_stride < 1) throw ConfigError("solver: snapshot_stride must be >= 1");
  if (scheme == Scheme::ExactLinear && params.k != 0.0)
    throw ConfigError("solver: ExactLinear requires k = 0 (linear run)");
}

namespace {

double* re_im(CField& c) { return reinterpret_cast<double*>(c.data()); }
const double* re_im(const CField& c) { return reinterpret_cast<const double*>(c.data()); }

void scatter_matrix(std::array<Field, 16>& dst, const std::vector<Eigen::Matrix4d>& mats,
                    const std::vector<int>& mode_to_unique, std::size_t total) {
  for (int e = 0; e < 16; e++) dst[e].assign(2 * total, 0.0);
  for (std::size_t i = 0; i < total; i++) {
    const Eigen::Matrix4d& m = mats[mode_to_unique[i]];
    for (int r = 0; r < 4; r++)
      for (int c = 0; c < 4; c++) {
        dst[4 * r + c][2 * i] = m(r, c);
        dst[4 * r + c][2 * i + 1] = m(r, c);
      }
  }
}

void scatter_vector(std::array<Field, 4>& dst, const std::vector<Eigen::Vector4d>& vecs,
                    const std::vector<int>& mode_to_unique, std::size_t total) {
  for (int c = 0; c < 4; c++) dst[c].assign(2 * total, 0.0);
  for (std::size_t i = 0; i < total; i++) {
    const Eigen::Vector4d& v = vecs[mode_to_unique[i]];
    for (int c = 0; c < 4; c++) {
      dst[c][2 * i] = v(c);
      dst[c][2 * i + 1] = v(c);
    }
  }
}

struct SpectralState {
  CField f[4];  // psi, v, w, z
  void resize(std::size_t total) {
    for (auto& c : f) c.assign(total, {0.0, 0.0});
  }
};

void apply_matrix(const std::array<Field, 16>& m, const SpectralState& in, SpectralState& out) {
  std::size_t n = m[0].size();
  const double* mp[16];
  const double* ip[4];
  double* op[4];
  for (int e = 0; e < 16; e++) mp[e] = m[e].data();
  for (int c = 0; c < 4; c++) {
    ip[c] = re_im(in.f[c]);
    op[c] = re_im(const_cast<CField&>(out.f[c]));
  }
  simd::active().mode_apply4(n, mp, ip, op);
}

// out_c += vec_c (.) nhat, all components
void add_vector_times(const std::array<Field, 4>& vec, const CField& nhat, SpectralState& out) {
  std::size_t n = vec[0].size();
  for (int c = 0; c < 4; c++)
    simd::active().fma_acc(n, vec[c].data(), re_im(nhat), re_im(out.f[c]));
}

// Returns the dealiased spectrum of the nonlinear w-increment.
CField nonlinear_spectrum(const Spectral& sp, const CField& psi_hat, const CField& v_hat,
                          const Field& v, const Field& w, const MediumParams& params,
                          NonlinearityForm form, bool dealias) {
  const Grid& g = sp.grid();
  const auto& k = simd::active();
  Field acc(g.total, 0.0);
  // k v w  (DefF) or v w (MainSystem; the k lands in the prefactor)
  k.fma_acc(g.total, v.data(), w.data(), acc.data());
  if (form == NonlinearityForm::DefF) k.scale(g.total, params.k, acc.data());
  Field gpsi, gv;
  for (int d = 0; d < g.n; d++) {
    sp.gradient(psi_hat, d, gpsi);
    sp.gradient(v_hat, d, gv);
    k.fma_acc(g.total, gpsi.data(), gv.data(), acc.data());
  }
  double pref = (form == NonlinearityForm::DefF) ? 2.0 / params.tau : 2.0 * params.k / params.tau;
  k.scale(g.total, pref, acc.data());

  CField nhat;
  sp.forward(acc, nhat);
  if (dealias) sp.apply_dealias(nhat);
  for (const auto& c : nhat)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw BlowUpError("non-finite nonlinear product (blow-up signal)");
  return nhat;
}

}  // namespace

ModeUpdateCache ModeUpdateCache::build(const Spectral& sp, const MediumParams& params,
                                       const MemoryKernel& kernel, double dt, Scheme scheme) {
  const Grid& g = sp.grid();
  ModeUpdateCache cache;
  cache.total = g.total;
  cache.scheme = scheme;

  std::map<double, int> unique;
  std::vector<int> mode_to_unique(g.total);
  std::vector<double> values;
  for (std::size_t i = 0; i < g.total; i++) {
    auto [it, inserted] = unique.try_emplace(g.ksq[i], static_cast<int>(values.size()));
    if (inserted) values.push_back(g.ksq[i]);
    mode_to_unique[i] = it->second;
  }

  std::size_t nu = values.size();
  std::vector<Eigen::Matrix4d> e_full(nu), e_half(nu);
  std::vector<Eigen::Vector4d> p1(nu), p2(nu), q(nu), w1(nu), w2(nu), w3(nu);
  parallel_for(nu, [&](std::size_t u) {
    Eigen::MatrixXd a = assemble_mode_system(params, kernel, values[u]).generator;
    Eigen::Vector4d b = Eigen::Vector4d::Unit(2);  // nonlinearity feeds the w row
    if (scheme == Scheme::ExactLinear) {
      e_full[u] = expm(dt * a);
    } else if (scheme == Scheme::ETD2) {
      auto phis = phi_functions(dt * a, 2);
      e_full[u] = phis[0];
      p1[u] = dt * phis[1] * b;
      p2[u] = dt * phis[2] * b;
    } else {
      auto phis = phi_functions(dt * a, 3);
      auto phis_half = phi_functions(0.5 * dt * a, 1);
      e_full[u] = phis[0];
      e_half[u] = phis_half[0];
      q[u] = 0.5 * dt * phis_half[1] * b;
      w1[u] = dt * (phis[1] - 3.0 * phis[2] + 4.0 * phis[3]) * b;
      w2[u] = 2.0 * dt * (phis[2] - 2.0 * phis[3]) * b;
      w3[u] = dt * (4.0 * phis[3] - phis[2]) * b;
    }
  });

  scatter_matrix(cache.exp_full, e_full, mode_to_unique, g.total);
  if (scheme == Scheme::ETD2) {
    scatter_vector(cache.p1, p1, mode_to_unique, g.total);
    scatter_vector(cache.p2, p2, mode_to_unique, g.total);
  } else if (scheme == Scheme::ETD4) {
    scatter_matrix(cache.exp_half, e_half, mode_to_unique, g.total);
    scatter_vector(cache.q, q, mode_to_unique, g.total);
    scatter_vector(cache.w1, w1, mode_to_unique, g.total);
    scatter_vector(cache.w2, w2, mode_to_unique, g.total);
    scatter_vector(cache.w3, w3, mode_to_unique, g.total);
  }
  return cache;
}

Field rhs_nonlinear(const StateField& state, const MediumParams& params, NonlinearityForm form,
                    bool dealias) {
  const Spectral& sp = *state.spectral;
  CField psi_hat, v_hat;
  sp.forward(state.psi, psi_hat);
  sp.forward(state.v, v_hat);
  CField nhat =
      nonlinear_spectrum(sp, psi_hat, v_hat, state.v, state.w, params, form, dealias);
  Field out;
  sp.backward(nhat, out);
  return out;
}

void step(StateField& state, const SolverConfig& config, const MediumParams& params,
          const MemoryKernel& kernel, const ModeUpdateCache& cache) {
  const Spectral& sp = *state.spectral;
  const Grid& g = sp.grid();
  Field psi_old;
  if (state.repr == MemoryRepr::History) psi_old = state.psi;

  SpectralState u;
  u.resize(g.total);
  sp.forward(state.psi, u.f[0]);
  sp.forward(state.v, u.f[1]);
  sp.forward(state.w, u.f[2]);
  if (state.repr == MemoryRepr::ReducedZ) {
    sp.forward(state.z, u.f[3]);
  } else {
    Field z = reduce_history(state, params, kernel);
    sp.forward(z, u.f[3]);
  }

  SpectralState out;
  out.resize(g.total);

  Field sv, sw;  // stage fields in real space
  auto stage_vw = [&](const SpectralState& s) {
    sp.backward(s.f[1], sv);
    sp.backward(s.f[2], sw);
  };
  auto nl = [&](const CField& psi_hat, const CField& v_hat, const Field& v, const Field& w) {
    return nonlinear_spectrum(sp, psi_hat, v_hat, v, w, params, config.nonlinearity_form,
                              config.dealias);
  };

  if (config.scheme == Scheme::ExactLinear) {
    apply_matrix(cache.exp_full, u, out);
  } else if (config.scheme == Scheme::ETD2) {
    CField n_hat = nl(u.f[0], u.f[1], state.v, state.w);
    apply_matrix(cache.exp_full, u, out);
    add_vector_times(cache.p1, n_hat, out);  // predictor a
    stage_vw(out);
    CField na_hat = nl(out.f[0], out.f[1], sv, sw);
    for (std::size_t i = 0; i < g.total; i++) na_hat[i] -= n_hat[i];
    add_vector_times(cache.p2, na_hat, out);
  } else {  // ETD4 (Cox-Matthews)
    CField n0 = nl(u.f[0], u.f[1], state.v, state.w);
    SpectralState sa, sb, sc;
    sa.resize(g.total);
    sb.resize(g.total);
    sc.resize(g.total);

    apply_matrix(cache.exp_half, u, sa);
    add_vector_times(cache.q, n0, sa);
    stage_vw(sa);
    CField na = nl(sa.f[0], sa.f[1], sv, sw);

    apply_matrix(cache.exp_half, u, sb);
    add_vector_times(cache.q, na, sb);
    stage_vw(sb);
    CField nb = nl(sb.f[0], sb.f[1], sv, sw);

    apply_matrix(cache.exp_half, sa, sc);
    CField tmp(g.total);
    for (std::size_t i = 0; i < g.total; i++) tmp[i] = 2.0 * nb[i] - n0[i];
    add_vector_times(cache.q, tmp, sc);
    stage_vw(sc);
    CField nc = nl(sc.f[0], sc.f[1], sv, sw);

    apply_matrix(cache.exp_full, u, out);
    add_vector_times(cache.w1, n0, out);
    for (std::size_t i = 0; i < g.total; i++) tmp[i] = na[i] + nb[i];
    add_vector_times(cache.w2, tmp, out);
    add_vector_times(cache.w3, nc, out);
  }

  bool reduced = state.repr == MemoryRepr::ReducedZ;
  sp.backward(out.f[0], state.psi);
  sp.backward(out.f[1], state.v);
  sp.backward(out.f[2], state.w);
  if (reduced) sp.backward(out.f[3], state.z);
  if (!reduced) {
    // exact shift-then-source: the source is the realized increment of psi
    Field v_mean = state.psi;
    const auto& k = simd::active();
    k.axpy(g.total, -1.0, psi_old.data(), v_mean.data());
    k.scale(g.total, 1.0 / config.dt, v_mean.data());
    advance_history(state, v_mean, config.dt);
  }
  state.time += config.dt;
}

Trajectory run(StateField state, const SolverConfig& config, const MediumParams& params,
               const MemoryKernel& kernel, const DiagnosticsHook& hook) {
  config.validate(params);
  params.validate();
  const Spectral& sp = *state.spectral;

  if (config.dealias) {
    CField tmp;
    for (Field* f : {&state.psi, &state.v, &state.w}) {
      sp.forward(*f, tmp);
      sp.apply_dealias(tmp);
      sp.backward(tmp, *f);
    }
  }

  const auto& k = simd::active();
  double sup0 = 1e-300;
  for (const Field* f : {&state.psi, &state.v, &state.w})
    sup0 = std::max(sup0, k.max_abs(f->size(), f->data()));
  const double blowup_limit = config.blowup_factor * sup0;

  std::size_t nsteps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
  if (std::fabs(nsteps * config.dt - config.t_end) > 1e-9 * std::max(1.0, config.t_end))
    throw ConfigError("solver: t_end must be an integer number of steps");

  ModeUpdateCache cache;
  if (nsteps > 0) cache = ModeUpdateCache::build(sp, params, kernel, config.dt, config.scheme);

  Trajectory traj;
  auto record = [&](std::size_t step_index) {
    traj.times.push_back(state.time);
    if (config.store_snapshots) traj.snapshots.push_back(state);
    if (hook) hook(state, step_index);
  };
  record(0);

  for (std::size_t i = 1; i <= nsteps; i++) {
    try {
      step(state, config, params, kernel, cache);
    } catch (const BlowUpError& e) {
      traj.failed = true;
      traj.failure = e.what();
      return traj;
    }
    double sup = 0.0;
    for (const Field* f : {&state.psi, &state.v, &state.w})
      sup = std::max(sup, k.max_abs(f->size(), f->data()));
    if (!std::isfinite(sup) || sup > blowup_limit) {
      traj.failed = true;
      traj.failure = "field sup-norm exceeded blow-up threshold";
      return traj;
    }
    if (i % static_cast<std::size_t>(config.snapshot_stride) == 0 || i == nsteps) record(i);
  }
  return traj;
}

}  // namespace jmgt
