#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparse_ergodic/kernels.hpp"

namespace sparse_ergodic::expsum {

using Complex = std::complex<double>;

/// coef * (n + shift)^exponent
struct PowerTerm {
  double coef = 0.0;
  double shift = 0.0;
  double exponent = 1.0;
};

/// sum_{lo <= n <= hi} phi(n/N) e(theta n + sum_j terms_j(n))
struct PhaseSum {
  std::int64_t lo = 1;
  std::int64_t hi = 0;
  double theta = 0.0;
  std::vector<PowerTerm> terms;
  std::int64_t N = 1;
  kernels::CutoffFunction cutoff = kernels::CutoffFunction::constant();

  std::int64_t length() const { return hi >= lo ? hi - lo + 1 : 0; }
  /// fractional part of the phase at n
  double phase_frac(std::int64_t n) const;
};

inline constexpr std::int64_t kMaxDirectLength = std::int64_t{1} << 24;

/// Compensated direct evaluation with per-term fractional reduction.
Complex exp_sum_direct(const PhaseSum& ps);

/// sum |phi(n/N)| over the range.
double amplitude_mass(const PhaseSum& ps);

struct VdcResult {
  double bound = 0.0;
  double direct = 0.0;
  double ratio = 0.0;
};

/// v |I| lambda^(1/2) + lambda^(-1/2)
double vdc_bound(double lambda, double v, std::int64_t interval_length);
/// Bound plus |direct|/bound for a concrete phase.
VdcResult vdc_certify(double lambda, double v, const PhaseSum& ps);

struct TwoFreqParams {
  int which = 1;  ///< case 1, 2 or 3
  std::int64_t N = 1 << 12;
  double c = 1.1;
  double theta = 0.0;
  std::int64_t t = 0;  ///< sum over N/2 < n <= t; 0 means t = N
  // case 1
  double h = 1.0;
  double u = 0.0;
  // cases 2, 3
  double h1 = 1.0;
  double h2 = 1.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double x = 1.0;
  double N0 = 2.0;  ///< case 2
  double H = 0.0;   ///< case 3
  kernels::CutoffFunction cutoff = kernels::CutoffFunction::constant();
};

struct BoundCheck {
  double direct = 0.0;
  double bound = 0.0;
  double ratio() const { return bound > 0.0 ? direct / bound : 0.0; }
};

/// Throws DomainError naming the violated precondition.
PhaseSum twofreq_phase(const TwoFreqParams& p);
double twofreq_bound(const TwoFreqParams& p);
BoundCheck twofreq_check(const TwoFreqParams& p);

struct PsiExpansion {
  double truncated = 0.0;
  double exact = 0.0;  ///< psi(t), right limit at integers
  double tail_bound = 0.0;
  double error = 0.0;  ///< |exact - truncated|
  bool at_jump = false;
};

PsiExpansion psi_expand(double t, double H);

/// Distance to the nearest integer (extended precision near integers).
double norm_dist(double t);

/// Fourier coefficient b_h of t -> min{1, 1/(H ||t||)}.
double tail_coefficient(std::int64_t h, double H);

struct CoefficientDecay {
  double H = 0.0;
  std::int64_t h_max = 0;
  std::vector<double> b;  ///< b_0..b_hmax
  double worst_ratio = 0.0;  ///< max |b_h| / min{log H / H, H / h^2}
};

CoefficientDecay coefficient_decay(double H, std::int64_t h_max);

struct MinSum {
  std::int64_t N = 0;
  double u = 0.0;
  double H = 0.0;
  double value = 0.0;
  double majorant = 0.0;
  double ratio() const { return value / majorant; }
};

/// sum_{N<n<=2N} min{1, 1/(H ||(n+u)^(1/c)||)}, H = N^(2-2/c+delta).
MinSum min_sum_check(std::int64_t N, double u, double c, double delta);

struct KSample {
  std::int64_t h1 = 0;
  std::int64_t h2 = 0;
  double K = 0.0;
};

struct SigmaSplit {
  std::int64_t N = 0;
  std::int64_t x = 0;
  double H = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  double err1 = 0.0;  ///< sampling standard errors (0 when exact)
  double err2 = 0.0;
  double err3 = 0.0;
  double bound1 = 0.0;  ///< N^(3/2-1/c)
  double bound2 = 0.0;  ///< N^(1-1/(3c)+delta)
  double bound3 = 0.0;  ///< N^(1-1/(2c)+delta)
  double diagonal_sum = 0.0;  ///< sum over h1 = -h2 of K / |h1 h2|
  double diagonal_bound = 0.0;  ///< N^(3/2-1/c)
  bool exact = true;
  std::vector<KSample> K_table;
};

inline constexpr std::int64_t kExactCore = 512;
inline constexpr std::int64_t kMinSigmaBudget = 256;

/// K_N(h1,h2;x) = sum_{u,v in {0,1}} |sum_m e(h2 (m+x+u)^(1/c) + h1 (m+v)^(1/c))|.
double K_value(std::int64_t N, std::int64_t x, double c, std::int64_t h1, std::int64_t h2);

SigmaSplit sigma_split(std::int64_t N, std::int64_t x, double c, double delta, std::int64_t sample_budget,
                       std::uint64_t seed = 0);

struct CountingHistogram {
  std::int64_t N = 0;
  double c = 1.0;
  std::int64_t x_lo = 0;
  std::vector<std::int64_t> counts;  ///< counts[i] for x = x_lo + i
  std::int64_t support_size = 0;
  std::int64_t max_count = 0;  ///< over x >= 1 in the range
  std::int64_t argmax = 0;
};

/// |{(n, m) : m < n, a_n - a_m = x}| over the support of the power average
/// kernel, via integer autocorrelation.
CountingHistogram counting_function(std::int64_t N, double c, std::int64_t x_lo, std::int64_t x_hi);
/// Pair enumeration oracle; N <= 2^13.
CountingHistogram counting_function_pairs(std::int64_t N, double c, std::int64_t x_lo, std::int64_t x_hi);

/// min over 1 <= k <= k_max and admissible n of
/// (g_k(n+1) - g_k(n)) / (k N^(1-2/c)), g_k(n) = n^c - (n-k)^c.
double gk_increment_ratio(std::int64_t N, double c, std::int64_t k_max);

std::string to_csv(const std::vector<TwoFreqParams>& params, const std::vector<BoundCheck>& checks);
std::string to_csv(const CountingHistogram& h);

}  // namespace sparse_ergodic::expsum
