#include "jmgt/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace jmgt {

using nlohmann::json;

namespace {

json default_json() {
  return json::parse(R"({
    "schema_version": 1,
    "medium": {"tau": 1.0, "c": 1.0, "b": 1.0, "k": 0.0, "alpha": 1.0},
    "kernel": {"kind": "exponential", "m": 0.5, "tau_g": 1.0, "csv_path": ""},
    "grid": {"n": 1, "N": 256, "L": 50.0},
    "solver": {"dt": 0.01, "t_end": 1.0, "scheme": "exact_linear",
               "nonlinearity_form": "def_f", "dealias": true, "snapshot_stride": 10,
               "memory": "reduced_z", "r_max_factor": 25.0, "store_snapshots": false},
    "initial": {
      "psi0": {"kind": "zero", "amplitude": 0.0, "width": 1.0, "mode": [1],
               "k_cutoff": 2.0, "zero_mean": false},
      "psi1": {"kind": "zero", "amplitude": 0.0, "width": 1.0, "mode": [1],
               "k_cutoff": 2.0, "zero_mean": false},
      "psi2": {"kind": "zero", "amplitude": 0.0, "width": 1.0, "mode": [1],
               "k_cutoff": 2.0, "zero_mean": false}
    },
    "analysis": {"s": 4, "rho_min": 1e-3, "rho_max": 1e3, "rho_points": 40,
                 "fit_window": [1e3, 1e4], "fit_tol": 0.05, "fit_samples": 31,
                 "decay_dim": 3, "decay_orders": [0, 1],
                 "profile": {"family": "gaussian", "a": 0.0, "beta": 3.0,
                             "amp0": 0.0, "amp1": 1.0, "amp2": 0.0, "rho_max": 0.0},
                 "lyapunov_f3_order": "literal"},
    "output": {"directory": "out", "csv": true, "json": true, "snapshots": false,
               "reproducible": false},
    "seed": 1
  })");
}

void merge(json& base, const json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

ProfileSpec parse_profile(const json& j) {
  ProfileSpec p;
  std::string kind = j.value("kind", "zero");
  if (kind == "zero")
    p.kind = ProfileSpec::Kind::Zero;
  else if (kind == "gaussian_bump")
    p.kind = ProfileSpec::Kind::GaussianBump;
  else if (kind == "fourier_mode")
    p.kind = ProfileSpec::Kind::FourierMode;
  else if (kind == "band_random")
    p.kind = ProfileSpec::Kind::BandRandom;
  else
    throw ConfigError("unknown profile kind: " + kind);
  p.amplitude = j.value("amplitude", 1.0);
  p.width = j.value("width", 1.0);
  if (j.contains("mode")) p.mode = j["mode"].get<std::vector<int>>();
  p.k_cutoff = j.value("k_cutoff", 2.0);
  p.zero_mean = j.value("zero_mean", false);
  return p;
}

ExperimentConfig from_merged(const json& j) {
  ExperimentConfig cfg;
  const json& med = j.at("medium");
  cfg.medium.tau = med.value("tau", 1.0);
  cfg.medium.c = med.value("c", 1.0);
  cfg.medium.b = med.value("b", 1.0);
  cfg.medium.k = med.value("k", 0.0);
  cfg.medium.alpha = med.value("alpha", 1.0);

  const json& ker = j.at("kernel");
  std::string kind = ker.value("kind", "exponential");
  if (kind == "exponential") {
    cfg.kernel = MemoryKernel::exponential(ker.value("m", 0.5), ker.value("tau_g", 1.0),
                                           cfg.medium.c);
  } else if (kind == "csv") {
    std::string path = ker.value("csv_path", "");
    if (path.empty()) throw ConfigError("kernel kind csv requires csv_path");
    cfg.kernel = MemoryKernel::from_csv(path);
  } else {
    throw ConfigError("unknown kernel kind: " + kind);
  }

  const json& gr = j.at("grid");
  cfg.grid.n = gr.value("n", 1);
  cfg.grid.N = gr.value("N", 256);
  cfg.grid.L = gr.value("L", 50.0);

  const json& so = j.at("solver");
  cfg.solver.dt = so.value("dt", 0.01);
  cfg.solver.t_end = so.value("t_end", 1.0);
  std::string scheme = so.value("scheme", "exact_linear");
  if (scheme == "exact_linear")
    cfg.solver.scheme = Scheme::ExactLinear;
  else if (scheme == "etd2")
    cfg.solver.scheme = Scheme::ETD2;
  else if (scheme == "etd4")
    cfg.solver.scheme = Scheme::ETD4;
  else
    throw ConfigError("unknown scheme: " + scheme);
  std::string form = so.value("nonlinearity_form", "def_f");
  if (form == "def_f")
    cfg.solver.nonlinearity_form = NonlinearityForm::DefF;
  else if (form == "main_system")
    cfg.solver.nonlinearity_form = NonlinearityForm::MainSystem;
  else
    throw ConfigError("unknown nonlinearity_form: " + form);
  cfg.solver.dealias = so.value("dealias", true);
  cfg.solver.snapshot_stride = so.value("snapshot_stride", 10);
  cfg.solver.store_snapshots = so.value("store_snapshots", false);
  std::string mem = so.value("memory", "reduced_z");
  if (mem == "reduced_z")
    cfg.memory_repr = MemoryRepr::ReducedZ;
  else if (mem == "history")
    cfg.memory_repr = MemoryRepr::History;
  else
    throw ConfigError("unknown memory representation: " + mem);
  cfg.r_max_factor = so.value("r_max_factor", 25.0);

  const json& ini = j.at("initial");
  cfg.initial.psi0 = parse_profile(ini.at("psi0"));
  cfg.initial.psi1 = parse_profile(ini.at("psi1"));
  cfg.initial.psi2 = parse_profile(ini.at("psi2"));
  cfg.seed = j.value("seed", 1);
  cfg.initial.seed = cfg.seed;

  const json& an = j.at("analysis");
  cfg.analysis.s = an.value("s", 4);
  cfg.analysis.rho_min = an.value("rho_min", 1e-3);
  cfg.analysis.rho_max = an.value("rho_max", 1e3);
  cfg.analysis.rho_points = an.value("rho_points", 40);
  if (an.contains("fit_window")) {
    cfg.analysis.fit_t_min = an["fit_window"].at(0).get<double>();
    cfg.analysis.fit_t_max = an["fit_window"].at(1).get<double>();
  }
  cfg.analysis.fit_tol = an.value("fit_tol", 0.05);
  cfg.analysis.fit_samples = an.value("fit_samples", 31);
  cfg.analysis.decay_dim = an.value("decay_dim", 3);
  if (an.contains("decay_orders"))
    cfg.analysis.decay_orders = an["decay_orders"].get<std::vector<int>>();
  std::string f3 = an.value("lyapunov_f3_order", "literal");
  cfg.f3_order = (f3 == "matched") ? F3Order::Matched : F3Order::Literal;
  if (an.contains("profile")) {
    const json& pr = an["profile"];
    std::string fam = pr.value("family", "gaussian");
    cfg.analysis.profile.family = (fam == "sobolev_limited")
                                      ? RadialProfile::Family::SobolevLimited
                                      : RadialProfile::Family::Gaussian;
    cfg.analysis.profile.a = pr.value("a", 0.0);
    cfg.analysis.profile.beta = pr.value("beta", 3.0);
    cfg.analysis.profile.amp0 = pr.value("amp0", 0.0);
    cfg.analysis.profile.amp1 = pr.value("amp1", 1.0);
    cfg.analysis.profile.amp2 = pr.value("amp2", 0.0);
    cfg.analysis.profile.rho_max = pr.value("rho_max", 0.0);
    cfg.analysis.profile.n_dim = cfg.analysis.decay_dim;
  }

  const json& out = j.at("output");
  cfg.output.directory = out.value("directory", "out");
  cfg.output.csv = out.value("csv", true);
  cfg.output.json = out.value("json", true);
  cfg.output.snapshots = out.value("snapshots", false);
  cfg.output.reproducible = out.value("reproducible", false);
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  medium.validate();
  solver.validate(medium);
  if (grid.n < 1 || grid.n > 3) throw ConfigError("grid.n must be 1..3");
  if (analysis.s < 1) throw ConfigError("analysis.s must be >= 1");
  if (memory_repr == MemoryRepr::ReducedZ && !kernel.is_exponential())
    throw ConfigError("reduced_z memory requires an exponential kernel");
  if (!(r_max_factor > 0)) throw ConfigError("r_max_factor must be positive");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  json merged = default_json();
  merge(merged, user);
  ExperimentConfig cfg = from_merged(merged);
  cfg.merged_json_ = merged.dump(2);
  return cfg;
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  json merged = merged_json_.empty() ? default_json() : json::parse(merged_json_);
  auto eq = assignment.find('=');
  if (eq == std::string::npos || assignment.empty() || assignment[0] != '/')
    throw ConfigError("override must look like /block/key=value: " + assignment);
  std::string ptr = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings allowed
  }
  try {
    merged[json::json_pointer(ptr)] = parsed;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad override pointer: ") + e.what());
  }
  *this = from_merged(merged);
  merged_json_ = merged.dump(2);
}

}  // namespace jmgt
