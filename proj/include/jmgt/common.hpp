#ifndef JMGT_COMMON_HPP
#define JMGT_COMMON_HPP

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <new>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace jmgt {

// 64-byte alignment so AVX2 loads never split cache lines.
template <typename T>
struct aligned_allocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;
  aligned_allocator() = default;
  template <typename U>
  aligned_allocator(const aligned_allocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = std::aligned_alloc(alignment, ((n * sizeof(T) + alignment - 1) / alignment) * alignment);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { std::free(p); }
  bool operator==(const aligned_allocator&) const { return true; }
};

using Field = std::vector<double, aligned_allocator<double>>;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

// Worker cap for embarrassingly parallel loops; 0 means hardware_concurrency.
void set_max_jobs(int jobs);
int max_jobs();

// Chunked parallel map over [0, n); each index is written to its own slot,
// so output ordering is deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jmgt

#endif
