#ifndef JMGT_GRID_HPP
#define JMGT_GRID_HPP

#include <complex>
#include <memory>

#include "jmgt/common.hpp"

namespace jmgt {

using CField = std::vector<std::complex<double>, aligned_allocator<std::complex<double>>>;

// Periodic torus [0, L)^n, N points per dimension (power of two, >= 8).
struct Grid {
  int n = 1;
  int N = 8;
  double L = 1.0;

  std::size_t total = 0;
  Field ksq;                   // |xi|^2 per flattened mode
  std::vector<Field> kcomp;    // k_d per mode, Nyquist zeroed (derivative multipliers)
  Field dealias;               // 1 inside the 2/3 band per dimension, else 0

  static Grid make(int n, int N, double L);
  double dx() const { return L / N; }
  double cell_volume() const;
  // x-coordinate of dimension d at flattened index
  double coord(std::size_t idx, int d) const;
};

// FFTW-backed complex transforms with cached plans. Forward is normalized so
// that Parseval reads  int |f|^2 dx = L^n sum_m |f_m|^2.
class Spectral {
 public:
  explicit Spectral(Grid grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }

  void forward(const Field& real_in, CField& spec_out) const;
  void backward(const CField& spec_in, Field& real_out) const;

  // convenience: out = d/dx_d of f, computed spectrally
  void gradient(const CField& spec_in, int d, Field& real_out) const;
  void apply_dealias(CField& spec) const;

  double parseval_factor() const;  // L^n

 private:
  Grid grid_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

using SpectralPtr = std::shared_ptr<const Spectral>;

}  // namespace jmgt

#endif
