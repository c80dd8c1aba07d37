#ifndef JMGT_IO_HPP
#define JMGT_IO_HPP

#include <string>
#include <vector>

#include "jmgt/appendix.hpp"
#include "jmgt/decay.hpp"
#include "jmgt/energy.hpp"
#include "jmgt/mode.hpp"
#include "jmgt/state.hpp"

namespace jmgt {

inline constexpr int kSchemaVersion = 1;

// columns: rho, re_lambda_1..4, im_lambda_1..4, abscissa
void write_abscissa_csv(const std::string& path, const AbscissaCurve& curve);

// trajectory rows: t followed by named norm columns
struct TrajectoryRow {
  double t;
  std::vector<double> values;
};
void write_trajectory_csv(const std::string& path, const std::vector<std::string>& columns,
                          const std::vector<TrajectoryRow>& rows, bool reproducible);

// decay series: t, then one column per derivative order
void write_series_csv(const std::string& path, const std::vector<double>& times,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series);

std::string kernel_report_json(const KernelReport& rep, const RegimeReport& regime);
std::string decay_fit_json(const std::vector<std::pair<std::string, DecayFit>>& fits);
std::string appendix_report_json(const AppendixReport& rep);

// Flat binary snapshot: magic "JMGTSNP1", then u32 n, u32 N, f64 L, u32 n_r
// (0 for ReducedZ), f64 time, then little-endian f64 fields in order
// psi, v, w, then z (ReducedZ) or eta ages 0..n_r (History).
void write_snapshot(const std::string& path, const StateField& state);
StateField read_snapshot(const std::string& path, SpectralPtr spectral);

// CSV slice of a 1-d field (x, value)
void write_field_csv(const std::string& path, const Grid& grid, const Field& f);

}  // namespace jmgt

#endif
