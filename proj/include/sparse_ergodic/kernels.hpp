#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparse_ergodic/oscfun.hpp"
#include "sparse_ergodic/precision.hpp"
#include "sparse_ergodic/seq.hpp"

namespace sparse_ergodic::kernels {

enum class Normalization : std::uint8_t {
  none = 0,
  power = 1,      ///< 1 / N^(1/c)
  by_n = 2,       ///< 1 / N
  by_mass = 3,    ///< 1 / W_N
  empirical = 4,  ///< 1 / sum X_n
};

const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// Finitely supported real kernel on Z: value(x) = values[x - offset].
struct Kernel {
  std::int64_t offset = 0;
  std::vector<double> values;
  std::int64_t N = 0;
  Normalization normalization = Normalization::none;
  double norm_factor = 1.0;
  bool half = true;
  /// Set when every value is an integer multiple of this unit; enables the
  /// exact integer correlation path.
  std::optional<double> count_unit;

  std::int64_t end() const { return offset + static_cast<std::int64_t>(values.size()); }
  double at(std::int64_t x) const;
  double sum() const;
  double l1() const;
  double l2sq() const;
  double linf() const;
  std::size_t support_size() const;
  /// Integer counts values / count_unit (requires count_unit).
  std::vector<std::int64_t> counts() const;

  static Kernel delta(std::int64_t at = 0);
};

// ---------------------------------------------------------------------------
// Cutoff functions

struct SupBounds {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double total() const { return phi + d1 + d2; }
};

/// phi = const, or phi_alpha(t) = chi(t) t^-alpha with chi = 1 on [1/2, 2],
/// 0 outside [1/4, 4], and C^2 ramps in between.
class CutoffFunction {
 public:
  static CutoffFunction constant(double value = 1.0);
  /// Throws DomainError if the certified bound exceeds 100.
  static CutoffFunction phi_alpha(double alpha);

  bool is_constant() const { return constant_; }
  double alpha() const { return alpha_; }
  double operator()(double t) const { return eval(t, 0); }
  double derivative(double t, int order) const { return eval(t, order); }
  double chi(double t) const;
  /// Upper bounds on sup|phi|, sup|phi'|, sup|phi''| over the real line.
  const SupBounds& bounds() const { return bounds_; }

 private:
  double eval(double t, int order) const;
  bool constant_ = true;
  double value_ = 1.0;
  double alpha_ = 0.0;
  SupBounds bounds_;
};

/// C^2 smoothstep on [0,1] with trapezoidal second derivative: S, S', S''.
struct Smoothstep {
  static constexpr double ramp = 0.02;
  static double value(double u, int order);
  /// sup |S^(order)|
  static double sup(int order);
};

// ---------------------------------------------------------------------------
// Constructions

/// (1/N) sum phi(n/N) delta_n over (N/2, N] (half) or [1, N].
Kernel birkhoff_kernel(std::int64_t N, const CutoffFunction& phi, bool half = true);

/// (1/N^(1/c)) sum phi(m/N) delta_m over m = floor(n^c) in (N/2, N].
Kernel power_average_kernel(std::int64_t N, double c,
                            const CutoffFunction& phi = CutoffFunction::constant());

/// Deterministic main term (1/(c N^(1/c))) sum_{N/2<n<=N} n^(1/c-1) delta_n.
Kernel deterministic_main_kernel(std::int64_t N, double c);

enum class RandomNormalization { expected, empirical };

/// (1/W_N) sum X_n delta_n or (1/sum X_n) sum X_n delta_n over (N/2, N].
Kernel random_average_kernel(const seq::IndicatorSeries& ind, std::int64_t N,
                             RandomNormalization norm = RandomNormalization::expected);

/// (1/W_N) sum n^-alpha delta_n over (N/2, N].
Kernel random_main_kernel(double alpha, std::int64_t N);

/// W_N = sum_{N/2 < n <= N} n^-alpha.
double expected_mass(double alpha, std::int64_t N);

// ---------------------------------------------------------------------------
// Algebra

Kernel reflect(const Kernel& k);
Kernel add(const Kernel& a, const Kernel& b, double sb = 1.0);
inline Kernel subtract(const Kernel& a, const Kernel& b) { return add(a, b, -1.0); }
Kernel convolve(const Kernel& a, const Kernel& b);
inline Kernel correlate(const Kernel& a, const Kernel& b) { return convolve(a, reflect(b)); }
/// O(|a||b|) reference.
Kernel convolve_direct(const Kernel& a, const Kernel& b);
/// Convolve a kernel with an input signal starting at index `signal_offset`.
std::vector<double> apply(const Kernel& k, const std::vector<double>& f);

struct FourierSup {
  double value = 0.0;
  double grid_spacing = 0.0;
  double theta = 0.0;
};

/// Grid maximum of |sum K(n) e(n theta)| over theta = j / (oversample * L);
/// a lower bound for the true sup.
FourierSup fourier_sup(const Kernel& k, int oversample = 8);

// ---------------------------------------------------------------------------
// Indicator expansion

enum class IdentityStatus { holds, fails, indeterminate };
const char* to_string(IdentityStatus s);

struct SawtoothCheck {
  IdentityStatus status = IdentityStatus::holds;
  int lhs = 0;  ///< membership of n in {floor(k^c)}
  double rhs = 0.0;
  Precision precision = Precision::binary64;
};

/// 1_{n in N_c} = ((n+1)^(1/c) - n^(1/c)) + psi(-(n+1)^(1/c)) - psi(-n^(1/c)).
SawtoothCheck sawtooth_identity_check(std::int64_t n, double c);

/// Truncated series -sum_{h=1}^{floor(H)} sin(2 pi h t) / (pi h).
double psi_truncated(double frac_t, double H);
/// psi(t) = {t} - 1/2 from a precomputed fractional part.
inline double psi_from_frac(double frac_t) { return frac_t - 0.5; }

struct FourierPieces {
  std::int64_t N = 0;
  double c = 1.0;
  double H = 0.0;
  Kernel indicator;  ///< 1_{N_c} on (N/2, N]
  Kernel fs;
  Kernel f1;
  Kernel f2;
  Kernel E;
  double reconstruction_error = 0.0;
};

inline constexpr double kDefaultDelta = 0.01;
double default_H(std::int64_t N, double c, double delta = kDefaultDelta);

FourierPieces fourier_pieces(std::int64_t N, double c, double H);

// ---------------------------------------------------------------------------
// Correlation diagnostics

struct CorrelationGap {
  std::int64_t N = 0;
  double gap_main = 0.0;
  double gap_small = 0.0;
  double at_zero = 0.0;
  bool exact_counts = true;
};

CorrelationGap correlation_gap(std::int64_t N, double c);

struct CorrelationDecomposition {
  std::int64_t N = 0;
  double D = 0.0;            ///< 1 / corr(0)
  Kernel rho;                ///< even, rho(0) = 0
  double rho_sup = 0.0;      ///< sup |rho|
  double residual_sup = 0.0; ///< sup of the remainder for |x| >= N^(1-alpha)
  double residual_small = 0.0;  ///< same for 0 < |x| < N^(1-alpha)
  double lipschitz_estimate = 0.0;
};

/// A is the average kernel; its main term B gives rho = B*B~ off zero.
CorrelationDecomposition correlation_decompose(const Kernel& A, const Kernel& B, double alpha);
CorrelationDecomposition correlation_decompose(std::int64_t N, double c);
CorrelationDecomposition correlation_decompose(const seq::IndicatorSeries& ind, std::int64_t N);

struct KernelFamily {
  std::vector<std::int64_t> scales;
  std::vector<Kernel> A;
  std::vector<Kernel> B;
  std::vector<Kernel> E;
};

KernelFamily deterministic_family(double c, const std::vector<std::int64_t>& scales);
KernelFamily random_family(const seq::IndicatorSeries& ind, const std::vector<std::int64_t>& scales);

struct TransferReport {
  int p = 1;
  oscfun::Kind kind = oscfun::Kind::variation;
  double lhs = 0.0;        ///< ||N(A_N f)||_p
  double rhs_main = 0.0;   ///< ||N'(B_N f)||_p
  double rhs_error = 0.0;  ///< sum_N ||E_N f||_p
  double constant = 1.0;
  bool holds = true;
  std::vector<double> ehat_sup;  ///< per scale
  double ehat_slope = 0.0;       ///< fitted against N
};

/// Pointwise transfer bound N(A f) <= N'(B f) + C sum_N |E_N f| in l^p,
/// with N' = N except for the jump functional, which uses altitude eps/4.
TransferReport transfer_bound_check(const KernelFamily& fam, const std::vector<double>& f,
                                    const oscfun::OscillationFunctional& functional, int p);

// ---------------------------------------------------------------------------
// Serialization

std::string to_json(const Kernel& k);
Kernel kernel_from_json(const std::string& text);
std::string to_binary(const Kernel& k);
Kernel kernel_from_binary(const std::string& bytes);
/// "x,value" rows.
std::string to_csv(const Kernel& k, bool skip_zeros = false);

}  // namespace sparse_ergodic::kernels
