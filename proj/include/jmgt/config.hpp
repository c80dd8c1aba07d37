#ifndef JMGT_CONFIG_HPP
#define JMGT_CONFIG_HPP

#include <string>
#include <vector>

#include "jmgt/decay.hpp"
#include "jmgt/energy.hpp"
#include "jmgt/medium.hpp"
#include "jmgt/solver.hpp"
#include "jmgt/state.hpp"

namespace jmgt {

struct GridConfig {
  int n = 1;
  int N = 256;
  double L = 50.0;
};

struct AnalysisConfig {
  int s = 4;
  double rho_min = 1e-3, rho_max = 1e3;
  int rho_points = 40;
  double fit_t_min = kFitWindowLo, fit_t_max = kFitWindowHi;
  double fit_tol = 0.05;
  int fit_samples = 31;
  int decay_dim = 3;
  std::vector<int> decay_orders = {0, 1};
  RadialProfile profile;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool snapshots = false;
  bool reproducible = false;
};

struct ExperimentConfig {
  MediumParams medium;
  MemoryKernel kernel = MemoryKernel::exponential(0.5, 1.0, 1.0);
  GridConfig grid;
  SolverConfig solver;
  MemoryRepr memory_repr = MemoryRepr::ReducedZ;
  double r_max_factor = 25.0;
  InitialData initial;
  AnalysisConfig analysis;
  OutputConfig output;
  F3Order f3_order = F3Order::Literal;
  std::uint64_t seed = 1;

  // cross-field checks (ExactLinear <=> k = 0, files exist, ...)
  void validate() const;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
  // JSON-pointer override, e.g. "/solver/dt=0.005"
  void apply_override(const std::string& assignment);
  std::string to_json_text() const { return merged_json_; }

 private:
  std::string merged_json_;  // defaults + file + overrides, for round trips
};

}  // namespace jmgt

#endif
