#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sparse_ergodic {

/// Version string embedded in every report.
const char* version();

/// Raised when a parameter leaves the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed experiment configuration or CLI usage.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Counter-based randomness. A draw is a pure function of (seed, stream, index),
// so sweeps can be reordered or split across workers without changing samples.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t index) {
  return mix64(mix64(seed ^ mix64(stream + 0x5851f42d4c957f2dULL)) ^ mix64(index));
}

/// Uniform double in [0,1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
  return static_cast<double>(counter_bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

// Stream identifiers keep independent uses of one seed apart.
namespace streams {
inline constexpr std::uint64_t bernoulli = 1;
inline constexpr std::uint64_t sigma_sampling = 2;
inline constexpr std::uint64_t axiom_suite = 3;
inline constexpr std::uint64_t experiment = 4;
}  // namespace streams

/// Process-wide worker count used by the data-parallel sweeps.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Static partition of [0, n) over worker threads. `fn(begin, end)` must only
/// touch state owned by its chunk.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_threads(), n == 0 ? 1 : n);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
}

/// Neumaier-compensated accumulator.
template <class T>
struct CompensatedSum {
  T sum{};
  T carry{};
  void add(T v) {
    const T t = sum + v;
    using std::abs;
    if (abs(sum) >= abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  T value() const { return sum + carry; }
};

}  // namespace sparse_ergodic
