#include "jmgt/common.hpp"
#include "jmgt/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace jmgt::simd {

bool avx2_supported() {
#if defined(JMGT_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Kernels* pick_default() {
#if defined(JMGT_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  const char* env = std::getenv("JMGT_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  if (avx2_supported()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const Kernels*> g_active{nullptr};

}  // namespace

const Kernels& active() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = pick_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

bool set_backend(const std::string& name) {
  if (name == "scalar") {
    g_active.store(&scalar_kernels(), std::memory_order_release);
    return true;
  }
#if defined(JMGT_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  if (name == "avx2" && avx2_supported()) {
    g_active.store(&avx2_kernels(), std::memory_order_release);
    return true;
  }
#endif
  return false;
}

}  // namespace jmgt::simd

namespace jmgt {

namespace {
std::atomic<int> g_jobs{0};
}

void set_max_jobs(int jobs) { g_jobs.store(jobs < 0 ? 0 : jobs); }

int max_jobs() {
  int j = g_jobs.load();
  if (j > 0) return j;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  int workers = max_jobs();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; i++) body(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; t++) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace jmgt
