#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace sparse_ergodic {

using QuadReal = boost::multiprecision::cpp_bin_float_quad;  // 113-bit significand
using WideReal = boost::multiprecision::cpp_bin_float_100;   // 100 decimal digits

// Precision ladder for floor/fractional-part evaluation of real powers.
enum class Precision : std::uint8_t { binary64 = 0, binary113 = 1, decimal100 = 2 };

const char* to_string(Precision p);

/// Result of floor(base^e) where e = c, or e = 1/c when `reciprocal`.
struct FloorPow {
  std::int64_t floor = 0;
  Precision precision = Precision::binary64;
  /// base^e agreed with an integer to within 1e-90 at 100 digits.
  bool integral = false;
};

/// Fractional part of base^e after escalation.
struct FracPow {
  double frac = 0.0;  ///< in [0,1)
  std::int64_t floor = 0;
  Precision precision = Precision::binary64;
  bool integral = false;
  /// False when the value sits within the 100-digit margin of an integer and
  /// integrality could not be confirmed.
  bool resolved = true;
};

/// floor(base^c) (or floor(base^(1/c))), escalating to 113-bit and then
/// 100-digit arithmetic whenever the double result lies within 1e-9 (or
/// within its own error bound) of an integer.
FloorPow floor_pow(double base, double c, bool reciprocal = false);

/// Fractional part of base^c (or base^(1/c)) with the same escalation. For
/// the reciprocal exponent, integrality is confirmed through the forward
/// power: base^(1/c) = k exactly iff k^c = base.
FracPow frac_pow(double base, double c, bool reciprocal = false);

/// (base+1)^(1/c) - base^(1/c), evaluated without cancellation.
double root_increment(double base, double c);

/// Distance to the nearest integer.
double dist_to_int(double t);

}  // namespace sparse_ergodic
