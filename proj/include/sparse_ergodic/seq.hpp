#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sparse_ergodic::seq {

struct Deterministic {
  double c = 1.0;
};

struct Random {
  double alpha = 0.5;
  std::uint64_t seed = 0;
};

using SequenceKind = std::variant<Deterministic, Random>;

/// Strictly increasing positive times a_1 < a_2 < ... (terms[n-1] = a_n).
struct SparseSequence {
  std::vector<std::int64_t> terms;
  SequenceKind kind;

  std::size_t size() const { return terms.size(); }
  /// |{n : a_n <= m}|
  std::size_t count_up_to(std::int64_t m) const;
};

/// Independent Bernoulli indicators X_n with P(X_n = 1) = n^-alpha, n = 1..n_max.
/// values[n-1] = X_n and partial_sums[n-1] = X_1 + ... + X_n.
struct IndicatorSeries {
  std::vector<std::uint8_t> values;
  std::vector<std::int64_t> partial_sums;
  double alpha = 0.5;
  std::uint64_t seed = 0;

  std::int64_t n_max() const { return static_cast<std::int64_t>(values.size()); }
  int at(std::int64_t n) const { return values[static_cast<std::size_t>(n - 1)]; }
  /// sum_{lo < n <= hi} X_n
  std::int64_t mass(std::int64_t lo, std::int64_t hi) const;
  /// W = sum_{lo < n <= hi} n^-alpha
  double expected_mass(std::int64_t lo, std::int64_t hi) const;
  /// Expected mass on (N/2, N] for N = n_max.
  double expected_upper_half_mass() const { return expected_mass(n_max() / 2, n_max()); }
};

/// Times floor(2^(k/R)) <= n_max, deduplicated.
struct LacunaryGrid {
  int R = 1;
  std::vector<std::int64_t> times;
  /// Smallest consecutive ratio over the whole grid (always > 1).
  double lambda = 0.0;
  /// Smallest consecutive ratio among times >= tail_start; 0 when the tail
  /// has fewer than two points.
  double tail_lambda = 0.0;
  std::int64_t tail_start = 0;
};

/// Thrown by hitting_times when the indicators carry fewer than `count` ones.
class ExhaustedError : public std::runtime_error {
 public:
  ExhaustedError(std::int64_t requested, std::int64_t available);
  std::int64_t requested() const { return requested_; }
  std::int64_t available() const { return available_; }

 private:
  std::int64_t requested_;
  std::int64_t available_;
};

/// floor(n^c) for n = 1..count, exact at integer boundaries. c in [1, 2).
SparseSequence floor_power_sequence(double c, std::int64_t count);

/// floor(n^c) for a single n, using the same escalation as floor_power_sequence.
std::int64_t floor_power(std::int64_t n, double c);

/// Reproducible from (seed, n): X_n depends on nothing else.
IndicatorSeries bernoulli_indicators(double alpha, std::int64_t n_max, std::uint64_t seed);

/// a_n = min{k : X_1 + ... + X_k = n}, n = 1..count.
SparseSequence hitting_times(const IndicatorSeries& ind, std::int64_t count);

/// 10 max{exp(-lambda^2/(10 V)), exp(-lambda/10)}
double chernoff_tail(double lambda, double variance);

/// Deviation envelope used for the upper-half mass:
/// 10 sqrt(log N) N^((1-alpha)/2).
double concentration_envelope(std::int64_t N, double alpha);

inline constexpr std::int64_t kDefaultTailStart = 1'000'000;

LacunaryGrid lacunary_grid(int R, std::int64_t n_max,
                           std::int64_t tail_start = kDefaultTailStart);

/// Line format: "n<TAB>a_n\n" per term, n starting at 1.
std::string to_tsv(const SparseSequence& s);
SparseSequence from_tsv(const std::string& text);
/// JSON array of the terms.
std::string to_json(const SparseSequence& s);

}  // namespace sparse_ergodic::seq
