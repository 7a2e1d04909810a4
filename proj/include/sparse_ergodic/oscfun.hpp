#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sparse_ergodic::oscfun {

using Complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kMaxDpLength = 20000;

// All functionals use |a_i - a_j| (modulus for complex input).

/// Longest chain k_0 < ... < k_M with every consecutive gap > epsilon.
/// Exact O(K^2) DP; throws DomainError for K > kMaxDpLength unless forced.
std::int64_t jump_count(std::span<const double> a, double epsilon, bool force = false);
std::int64_t jump_count(std::span<const Complex> a, double epsilon, bool force = false);

/// Anchored scan: count moves of more than epsilon away from the last anchor.
/// Always <= jump_count.
std::int64_t jump_count_greedy(std::span<const double> a, double epsilon);
std::int64_t jump_count_greedy(std::span<const Complex> a, double epsilon);

/// r-variation, r >= 1 or r = kInfinity (diameter).
double variation(std::span<const double> a, double r, bool force = false);
double variation(std::span<const Complex> a, double r, bool force = false);

double diameter(std::span<const double> a);
double diameter(std::span<const Complex> a);

/// Oscillation over blocks [M_j, M_{j+1}] given 0-based breakpoints
/// M_1 < ... < M_{J+1}.
double oscillation(std::span<const double> a, std::span<const std::size_t> breakpoints);
double oscillation(std::span<const Complex> a, std::span<const std::size_t> breakpoints);

enum class Kind { jump, variation, oscillation, diameter };

const char* to_string(Kind k);
Kind kind_from_string(const std::string& s);

struct OscillationFunctional {
  Kind kind = Kind::variation;
  double epsilon = 1.0;
  double r = 2.0;
  std::vector<std::size_t> breakpoints;

  static OscillationFunctional jump(double eps);
  static OscillationFunctional var(double r);
  static OscillationFunctional osc(std::vector<std::size_t> bps);
  static OscillationFunctional diam();

  /// Throws DomainError if the parameters are invalid.
  void validate() const;
};

/// Scalar value of the functional: epsilon*sqrt(N_eps) for jump, V^r for
/// variation, O for oscillation, V^inf for diameter.
double evaluate(const OscillationFunctional& f, std::span<const double> a);
double evaluate(const OscillationFunctional& f, std::span<const Complex> a);

struct AxiomEntry {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  /// max over trials of lhs / (constant * rhs)
  double worst_ratio = 0.0;
  double constant = 1.0;
};

struct AxiomReport {
  std::vector<AxiomEntry> entries;
  std::int64_t total_violations() const;
};

enum class Family { all, jump, variation, oscillation };

/// Checks the instantiated inequalities on `trials` random series per entry.
AxiomReport axiom_suite(Family family, std::int64_t trials, std::uint64_t seed);

/// Series I/O: JSON array of numbers, or raw little-endian float64 block.
std::vector<double> series_from_json(const std::string& text);
std::string series_to_json(std::span<const double> a);
std::vector<double> series_from_binary(const std::string& bytes);
std::string series_to_binary(std::span<const double> a);

}  // namespace sparse_ergodic::oscfun
