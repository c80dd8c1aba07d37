#include <doctest.h>

#include <cmath>
#include <random>

#include "jmgt/common.hpp"
#include "jmgt/simd/kernels.hpp"

using namespace jmgt;

namespace {

Field random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(n);
  for (auto& x : f) x = dist(rng);
  return f;
}

bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * (1.0 + std::fabs(a) + std::fabs(b));
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
  if (!simd::avx2_supported()) {
    MESSAGE("avx2 not available; dispatch falls back to scalar");
    CHECK(simd::active().name == std::string("scalar"));
    return;
  }
  const auto& s = simd::scalar_kernels();
  const auto& a = simd::avx2_kernels();
  for (std::size_t n : {1u, 4u, 7u, 64u, 1023u, 4096u}) {
    Field x = random_field(n, 11 * n + 1);
    Field y = random_field(n, 11 * n + 2);
    Field w = random_field(n, 11 * n + 3);

    Field ys = y, ya = y;
    s.axpy(n, 0.37, x.data(), ys.data());
    a.axpy(n, 0.37, x.data(), ya.data());
    for (std::size_t i = 0; i < n; i++) CHECK(ys[i] == doctest::Approx(ya[i]).epsilon(1e-14));

    Field xs = x, xa = x;
    s.scale(n, -1.7, xs.data());
    a.scale(n, -1.7, xa.data());
    for (std::size_t i = 0; i < n; i++) CHECK(xs[i] == xa[i]);

    Field os(n, 0.5), oa(n, 0.5);
    s.fma_acc(n, x.data(), y.data(), os.data());
    a.fma_acc(n, x.data(), y.data(), oa.data());
    for (std::size_t i = 0; i < n; i++) CHECK(os[i] == doctest::Approx(oa[i]).epsilon(1e-14));

    CHECK(close(s.dot(n, x.data(), y.data()), a.dot(n, x.data(), y.data()), 1e-13));
    CHECK(close(s.sum_sq(n, x.data()), a.sum_sq(n, x.data()), 1e-13));
    CHECK(close(s.weighted_sum_sq(n, w.data(), x.data()),
                a.weighted_sum_sq(n, w.data(), x.data()), 1e-13));
    CHECK(close(s.weighted_dot(n, w.data(), x.data(), y.data()),
                a.weighted_dot(n, w.data(), x.data(), y.data()), 1e-13));
    CHECK(s.max_abs(n, x.data()) == a.max_abs(n, x.data()));
  }
}

TEST_CASE("mode_apply4 backends agree") {
  if (!simd::avx2_supported()) return;
  const std::size_t n = 2 * 513;  // interleaved re/im for 513 modes
  std::vector<Field> m(16), in(4);
  for (int e = 0; e < 16; e++) m[e] = random_field(n, 100 + e);
  for (int c = 0; c < 4; c++) in[c] = random_field(n, 200 + c);
  std::vector<Field> out_s(4, Field(n, 0.0)), out_a(4, Field(n, 0.0));
  const double* mp[16];
  const double* ip[4];
  double* op_s[4];
  double* op_a[4];
  for (int e = 0; e < 16; e++) mp[e] = m[e].data();
  for (int c = 0; c < 4; c++) {
    ip[c] = in[c].data();
    op_s[c] = out_s[c].data();
    op_a[c] = out_a[c].data();
  }
  simd::scalar_kernels().mode_apply4(n, mp, ip, op_s);
  simd::avx2_kernels().mode_apply4(n, mp, ip, op_a);
  for (int c = 0; c < 4; c++)
    for (std::size_t i = 0; i < n; i++)
      CHECK(out_s[c][i] == doctest::Approx(out_a[c][i]).epsilon(1e-14));
}

TEST_CASE("backend selection") {
  CHECK(simd::set_backend("scalar"));
  CHECK(simd::active().name == std::string("scalar"));
  if (simd::avx2_supported()) {
    CHECK(simd::set_backend("avx2"));
    CHECK(simd::active().name == std::string("avx2"));
  }
  CHECK_FALSE(simd::set_backend("neon"));
}
