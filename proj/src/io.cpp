#include "jmgt/io.hpp"

#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>

namespace jmgt {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.precision(17);
  return out;
}

}  // namespace

void write_abscissa_csv(const std::string& path, const AbscissaCurve& curve) {
  auto out = open_out(path);
  out << "rho,re_lambda_1,re_lambda_2,re_lambda_3,re_lambda_4,"
         "im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4,abscissa\n";
  for (const auto& s : curve.samples) {
    out << s.rho;
    for (int i = 0; i < 4; i++)
      out << ',' << (s.converged ? s.eigenvalues[i].real() : std::nan(""));
    for (int i = 0; i < 4; i++)
      out << ',' << (s.converged ? s.eigenvalues[i].imag() : std::nan(""));
    out << ',' << s.abscissa << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const std::vector<std::string>& columns,
                          const std::vector<TrajectoryRow>& rows, bool reproducible) {
  auto out = open_out(path);
  if (!reproducible) {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    out << "# generated_unix_ms="
        << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << '\n';
  }
  out << "t";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& r : rows) {
    out << r.t;
    for (double v : r.values) out << ',' << v;
    out << '\n';
  }
}

void write_series_csv(const std::string& path, const std::vector<double>& times,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  auto out = open_out(path);
  out << "t";
  for (const auto& [name, _] : series) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < times.size(); i++) {
    out << times[i];
    for (const auto& [_, vals] : series) out << ',' << vals[i];
    out << '\n';
  }
}

std::string kernel_report_json(const KernelReport& rep, const RegimeReport& regime) {
  json j;
  j["schema_version"] = kSchemaVersion;
  auto dump = [](const AssumptionCheck& c) {
    return json{{"pass", c.pass}, {"witness_r", c.witness_r}, {"detail", c.detail}};
  };
  j["assumptions"] = {{"G1", dump(rep.g1)}, {"G2", dump(rep.g2)}, {"G3", dump(rep.g3)},
                      {"G4", dump(rep.g4)}};
  j["all_pass"] = rep.all_pass();
  j["c_g_sq"] = rep.c_g_sq;
  j["zeta_best"] = rep.zeta_best;
  const char* names[] = {"Subcritical", "Critical", "SupercriticalChiNegative"};
  j["regime"] = names[static_cast<int>(regime.regime)];
  j["chi"] = regime.chi;
  j["delta"] = regime.delta;
  return j.dump(2);
}

std::string decay_fit_json(const std::vector<std::pair<std::string, DecayFit>>& fits) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["fits"] = json::object();
  bool all = true;
  for (const auto& [name, f] : fits) {
    j["fits"][name] = {{"exponent", f.exponent}, {"r2", f.r2},     {"t_min", f.t_min},
                       {"t_max", f.t_max},       {"target", f.target}, {"tol", f.tol},
                       {"pass", f.pass}};
    all = all && f.pass;
  }
  j["all_pass"] = all;
  return j.dump(2);
}

std::string appendix_report_json(const AppendixReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["checks"] = json::array();
  for (const auto& c : rep.checks)
    j["checks"].push_back({{"name", c.name},
                           {"measured", c.measured},
                           {"refined", c.refined},
                           {"stable", c.stable},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

namespace {
constexpr char kMagic[8] = {'J', 'M', 'G', 'T', 'S', 'N', 'P', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_field(std::ofstream& out, const Field& f) {
  out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(8 * f.size()));
}
}  // namespace

void write_snapshot(const std::string& path, const StateField& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot file: " + path);
  const Grid& g = state.grid();
  out.write(kMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(g.n));
  put_u32(out, static_cast<std::uint32_t>(g.N));
  put_f64(out, g.L);
  bool hist = state.repr == MemoryRepr::History;
  put_u32(out, hist ? static_cast<std::uint32_t>(state.eta.n_r) : 0u);
  put_f64(out, hist ? state.eta.dr : 0.0);
  put_f64(out, state.time);
  put_u32(out, hist ? static_cast<std::uint32_t>(state.eta.horizon) : 0u);
  put_u32(out, hist && !state.eta.jump.empty() ? 1u : 0u);
  put_field(out, state.psi);
  put_field(out, state.v);
  put_field(out, state.w);
  if (hist) {
    for (int j = 0; j <= state.eta.n_r; j++) put_field(out, state.eta.at_age(j));
    if (!state.eta.jump.empty()) put_field(out, state.eta.jump);
  } else {
    put_field(out, state.z);
  }
}

StateField read_snapshot(const std::string& path, SpectralPtr spectral) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad snapshot magic");
  std::uint32_t n, N, n_r, horizon, has_jump;
  double L, dr, time;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&N), 4);
  in.read(reinterpret_cast<char*>(&L), 8);
  in.read(reinterpret_cast<char*>(&n_r), 4);
  in.read(reinterpret_cast<char*>(&dr), 8);
  in.read(reinterpret_cast<char*>(&time), 8);
  in.read(reinterpret_cast<char*>(&horizon), 4);
  in.read(reinterpret_cast<char*>(&has_jump), 4);
  const Grid& g = spectral->grid();
  if (static_cast<int>(n) != g.n || static_cast<int>(N) != g.N)
    throw std::runtime_error("snapshot grid mismatch");
  StateField st;
  st.spectral = std::move(spectral);
  st.time = time;
  auto get_field = [&](Field& f) {
    f.resize(g.total);
    in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(8 * g.total));
  };
  get_field(st.psi);
  get_field(st.v);
  get_field(st.w);
  if (n_r > 0) {
    st.repr = MemoryRepr::History;
    st.eta.init(static_cast<int>(n_r), dr, g.total);
    for (std::uint32_t j = 0; j <= n_r; j++) get_field(st.eta.at_age(static_cast<int>(j)));
    st.eta.horizon = static_cast<int>(horizon);
    if (has_jump) get_field(st.eta.jump);
  } else {
    st.repr = MemoryRepr::ReducedZ;
    get_field(st.z);
  }
  return st;
}

void write_field_csv(const std::string& path, const Grid& grid, const Field& f) {
  auto out = open_out(path);
  out << "x,value\n";
  for (std::size_t i = 0; i < grid.total; i++) out << grid.coord(i, 0) << ',' << f[i] << '\n';
}

}  // namespace jmgt
