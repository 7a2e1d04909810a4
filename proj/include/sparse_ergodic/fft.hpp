#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sparse_ergodic::fft {

/// Smallest 2^a 3^b 5^c 7^d that is >= n.
std::size_t good_size(std::size_t n);

/// Linear convolution, length a.size()+b.size()-1.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

/// Direct O(|a||b|) convolution.
std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b);

struct CountConvolution {
  std::vector<std::int64_t> values;
  /// False if any FFT output was further than 1/4 from an integer; the
  /// values are then rounded floating-point results.
  bool exact = true;
  double max_residual = 0.0;
  bool used_fft = false;
};

/// Convolution of integer count vectors. Small inputs use direct int64
/// accumulation; larger ones use a double FFT rounded to the nearest integer.
CountConvolution convolve_counts(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// |sum_n a[n] e(n j / len)| for j = 0..len/2 (a is zero-padded to len).
/// For real input the modulus on the other half of the circle is the mirror.
std::vector<double> dft_modulus(std::span<const double> a, std::size_t len);

/// Cyclic convolution on Z/m (any m).
std::vector<double> cyclic_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace sparse_ergodic::fft
