#include "sparse_ergodic/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/fft.hpp"
#include "sparse_ergodic/fit.hpp"

namespace sparse_ergodic::kernels {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::none:
      return "none";
    case Normalization::power:
      return "power";
    case Normalization::by_n:
      return "by_n";
    case Normalization::by_mass:
      return "by_mass";
    case Normalization::empirical:
      return "empirical";
  }
  return "?";
}

Normalization normalization_from_string(const std::string& s) {
  for (auto n : {Normalization::none, Normalization::power, Normalization::by_n, Normalization::by_mass,
                 Normalization::empirical}) {
    if (s == to_string(n)) return n;
  }
  throw ConfigError("unknown kernel normalization '" + s + "'");
}

double Kernel::at(std::int64_t x) const {
  if (x < offset || x >= end()) return 0.0;
  return values[static_cast<std::size_t>(x - offset)];
}

double Kernel::sum() const {
  CompensatedSum<double> s;
  for (double v : values) s.add(v);
  return s.value();
}

double Kernel::l1() const {
  CompensatedSum<double> s;
  for (double v : values) s.add(std::abs(v));
  return s.value();
}

double Kernel::l2sq() const {
  CompensatedSum<double> s;
  for (double v : values) s.add(v * v);
  return s.value();
}

double Kernel::linf() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t Kernel::support_size() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
}

std::vector<std::int64_t> Kernel::counts() const {
  if (!count_unit) throw DomainError("Kernel::counts: kernel has no count unit");
  std::vector<std::int64_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::llround(values[i] / *count_unit);
  return out;
}

Kernel Kernel::delta(std::int64_t at) {
  Kernel k;
  k.offset = at;
  k.values = {1.0};
  k.count_unit = 1.0;
  return k;
}

// ---------------------------------------------------------------------------
// Smoothstep and cutoffs

namespace {
constexpr double kPeak = 2.0 / (0.5 - Smoothstep::ramp);  // S'' plateau height

// S and derivatives on [0, 1/2].
double left_half(double u, int order) {
  constexpr double r = Smoothstep::ramp;
  constexpr double a = kPeak;
  constexpr double smax = a * (0.5 - r);
  if (u <= r) {
    if (order == 0) return a * u * u * u / (6.0 * r);
    if (order == 1) return a * u * u / (2.0 * r);
    return a * u / r;
  }
  if (u <= 0.5 - r) {
    const double w = u - r;
    if (order == 0) return a * r * r / 6.0 + 0.5 * a * r * w + 0.5 * a * w * w;
    if (order == 1) return 0.5 * a * r + a * w;
    return a;
  }
  const double v = 0.5 - u;
  if (order == 0) return 0.5 - (smax * v - a * v * v * v / (6.0 * r));
  if (order == 1) return smax - a * v * v / (2.0 * r);
  return a * v / r;
}
}  // namespace

double Smoothstep::value(double u, int order) {
  if (u <= 0.0) return order == 0 ? 0.0 : 0.0;
  if (u >= 1.0) return order == 0 ? 1.0 : 0.0;
  if (u <= 0.5) return left_half(u, order);
  // S(u) = 1 - S(1-u)
  const double m = left_half(1.0 - u, order);
  if (order == 0) return 1.0 - m;
  if (order == 1) return m;
  return -m;
}

double Smoothstep::sup(int order) {
  if (order == 0) return 1.0;
  if (order == 1) return kPeak * (0.5 - ramp);
  return kPeak;
}

CutoffFunction CutoffFunction::constant(double value) {
  CutoffFunction f;
  f.constant_ = true;
  f.value_ = value;
  f.bounds_ = {std::abs(value), 0.0, 0.0};
  return f;
}

CutoffFunction CutoffFunction::phi_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("phi_alpha: alpha must lie in [0, 1)");
  CutoffFunction f;
  f.constant_ = false;
  f.alpha_ = alpha;
  const double s1 = Smoothstep::sup(1);
  const double s2 = Smoothstep::sup(2);
  // t^-alpha and its derivatives are largest at the left end of each region.
  auto g = [alpha](double t, int order) {
    if (order == 0) return std::pow(t, -alpha);
    if (order == 1) return alpha * std::pow(t, -alpha - 1.0);
    return alpha * (alpha + 1.0) * std::pow(t, -alpha - 2.0);
  };
  struct Region {
    double left;
    double chi1;
    double chi2;
  };
  const Region regions[] = {{0.25, 4.0 * s1, 16.0 * s2}, {0.5, 0.0, 0.0}, {2.0, 0.5 * s1, 0.25 * s2}};
  SupBounds b;
  for (const auto& r : regions) {
    b.phi = std::max(b.phi, g(r.left, 0));
    b.d1 = std::max(b.d1, r.chi1 * g(r.left, 0) + g(r.left, 1));
    b.d2 = std::max(b.d2, r.chi2 * g(r.left, 0) + 2.0 * r.chi1 * g(r.left, 1) + g(r.left, 2));
  }
  f.bounds_ = b;
  if (b.total() > 100.0) {
    throw DomainError("phi_alpha: certified bound " + std::to_string(b.total()) + " exceeds 100 for alpha=" +
                      std::to_string(alpha));
  }
  return f;
}

namespace {
double chi_derivative(double t, int order) {
  if (t <= 0.25 || t >= 4.0) return 0.0;
  if (t < 0.5) {
    const double s = Smoothstep::value(4.0 * (t - 0.25), order);
    return order == 0 ? s : order == 1 ? 4.0 * s : 16.0 * s;
  }
  if (t <= 2.0) return order == 0 ? 1.0 : 0.0;
  const double s = Smoothstep::value(0.5 * (4.0 - t), order);
  return order == 0 ? s : order == 1 ? -0.5 * s : 0.25 * s;
}
}  // namespace

double CutoffFunction::chi(double t) const { return constant_ ? 1.0 : chi_derivative(t, 0); }

double CutoffFunction::eval(double t, int order) const {
  if (constant_) return order == 0 ? value_ : 0.0;
  if (t <= 0.25 || t >= 4.0) return 0.0;
  const double a = alpha_;
  const double g0 = std::pow(t, -a);
  const double g1 = -a * g0 / t;
  const double g2 = a * (a + 1.0) * g0 / (t * t);
  const double c0 = chi_derivative(t, 0);
  if (order == 0) return c0 * g0;
  const double c1 = chi_derivative(t, 1);
  if (order == 1) return c1 * g0 + c0 * g1;
  const double c2 = chi_derivative(t, 2);
  return c2 * g0 + 2.0 * c1 * g1 + c0 * g2;
}

// ---------------------------------------------------------------------------
// Constructions

namespace {
std::int64_t half_start(std::int64_t N) { return N / 2 + 1; }

void check_c(double c, const char* who) {
  if (!(c > 1.0 && c < 2.0)) throw DomainError(std::string(who) + ": c must lie in (1, 2)");
}
}  // namespace

double expected_mass(double alpha, std::int64_t N) {
  CompensatedSum<double> s;
  for (std::int64_t n = half_start(N); n <= N; ++n) s.add(std::pow(static_cast<double>(n), -alpha));
  return s.value();
}

Kernel birkhoff_kernel(std::int64_t N, const CutoffFunction& phi, bool half) {
  if (N < 4) throw DomainError("birkhoff_kernel: N must be >= 4");
  Kernel k;
  k.N = N;
  k.half = half;
  k.normalization = Normalization::by_n;
  k.norm_factor = 1.0 / static_cast<double>(N);
  k.offset = half ? half_start(N) : 1;
  k.values.resize(static_cast<std::size_t>(N - k.offset + 1));
  for (std::int64_t n = k.offset; n <= N; ++n) {
    k.values[static_cast<std::size_t>(n - k.offset)] =
        phi(static_cast<double>(n) / static_cast<double>(N)) / static_cast<double>(N);
  }
  if (phi.is_constant() && phi(0.0) != 0.0) k.count_unit = phi(0.0) / static_cast<double>(N);
  return k;
}

Kernel power_average_kernel(std::int64_t N, double c, const CutoffFunction& phi) {
  if (N < 16) throw DomainError("power_average_kernel: N must be >= 16");
  check_c(c, "power_average_kernel");
  Kernel k;
  k.N = N;
  k.half = true;
  k.normalization = Normalization::power;
  const double root = std::pow(static_cast<double>(N), 1.0 / c);
  k.norm_factor = 1.0 / root;
  k.offset = half_start(N);
  k.values.assign(static_cast<std::size_t>(N - k.offset + 1), 0.0);
  std::int64_t n = std::max<std::int64_t>(1, floor_pow(static_cast<double>(N) / 2.0, c, true).floor - 1);
  for (;; ++n) {
    const std::int64_t m = seq::floor_power(n, c);
    if (m > N) break;
    if (m >= k.offset) {
      k.values[static_cast<std::size_t>(m - k.offset)] = phi(static_cast<double>(m) / static_cast<double>(N)) / root;
    }
  }
  if (phi.is_constant() && phi(0.0) != 0.0) k.count_unit = phi(0.0) / root;
  return k;
}

Kernel deterministic_main_kernel(std::int64_t N, double c) {
  check_c(c, "deterministic_main_kernel");
  Kernel k;
  k.N = N;
  k.half = true;
  k.normalization = Normalization::power;
  const double root = std::pow(static_cast<double>(N), 1.0 / c);
  k.norm_factor = 1.0 / root;
  k.offset = half_start(N);
  k.values.resize(static_cast<std::size_t>(N - k.offset + 1));
  for (std::int64_t n = k.offset; n <= N; ++n) {
    k.values[static_cast<std::size_t>(n - k.offset)] = std::pow(static_cast<double>(n), 1.0 / c - 1.0) / (c * root);
  }
  return k;
}

Kernel random_average_kernel(const seq::IndicatorSeries& ind, std::int64_t N, RandomNormalization norm) {
  if (N < 2) throw DomainError("random_average_kernel: N must be >= 2");
  if (ind.n_max() < N) throw DomainError("random_average_kernel: indicators do not cover (N/2, N]");
  Kernel k;
  k.N = N;
  k.half = true;
  k.offset = half_start(N);
  double scale = 0.0;
  if (norm == RandomNormalization::expected) {
    k.normalization = Normalization::by_mass;
    scale = expected_mass(ind.alpha, N);
  } else {
    k.normalization = Normalization::empirical;
    scale = static_cast<double>(ind.mass(N / 2, N));
    if (scale == 0.0) throw DomainError("random_average_kernel: zero empirical mass on (N/2, N]");
  }
  k.norm_factor = 1.0 / scale;
  k.count_unit = 1.0 / scale;
  k.values.resize(static_cast<std::size_t>(N - k.offset + 1));
  for (std::int64_t n = k.offset; n <= N; ++n) {
    k.values[static_cast<std::size_t>(n - k.offset)] = ind.at(n) ? 1.0 / scale : 0.0;
  }
  return k;
}

Kernel random_main_kernel(double alpha, std::int64_t N) {
  Kernel k;
  k.N = N;
  k.half = true;
  k.offset = half_start(N);
  k.normalization = Normalization::by_mass;
  const double W = expected_mass(alpha, N);
  k.norm_factor = 1.0 / W;
  k.values.resize(static_cast<std::size_t>(N - k.offset + 1));
  for (std::int64_t n = k.offset; n <= N; ++n) {
    k.values[static_cast<std::size_t>(n - k.offset)] = std::pow(static_cast<double>(n), -alpha) / W;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Algebra

Kernel reflect(const Kernel& k) {
  Kernel r = k;
  r.offset = k.values.empty() ? -k.offset : -(k.end() - 1);
  std::reverse(r.values.begin(), r.values.end());
  return r;
}

Kernel add(const Kernel& a, const Kernel& b, double sb) {
  if (a.values.empty()) {
    Kernel r = b;
    for (auto& v : r.values) v *= sb;
    r.count_unit.reset();
    return r;
  }
  if (b.values.empty()) return a;
  Kernel r;
  r.N = a.N;
  r.half = a.half;
  r.offset = std::min(a.offset, b.offset);
  const std::int64_t e = std::max(a.end(), b.end());
  r.values.assign(static_cast<std::size_t>(e - r.offset), 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) r.values[static_cast<std::size_t>(a.offset - r.offset) + i] += a.values[i];
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    r.values[static_cast<std::size_t>(b.offset - r.offset) + i] += sb * b.values[i];
  }
  return r;
}

Kernel convolve(const Kernel& a, const Kernel& b) {
  Kernel r;
  r.N = std::max(a.N, b.N);
  r.offset = a.offset + b.offset;
  if (a.values.empty() || b.values.empty()) return r;
  if (a.count_unit && b.count_unit) {
    const auto ca = a.counts();
    const auto cb = b.counts();
    const auto cc = fft::convolve_counts(ca, cb);
    if (cc.exact) {
      const double unit = *a.count_unit * *b.count_unit;
      r.values.resize(cc.values.size());
      for (std::size_t i = 0; i < cc.values.size(); ++i) r.values[i] = static_cast<double>(cc.values[i]) * unit;
      r.count_unit = unit;
      return r;
    }
    std::clog << "warning: integer correlation path not exact (residual " << cc.max_residual
              << "); using floating point\n";
  }
  r.values = fft::convolve(a.values, b.values);
  return r;
}

Kernel convolve_direct(const Kernel& a, const Kernel& b) {
  Kernel r;
  r.N = std::max(a.N, b.N);
  r.offset = a.offset + b.offset;
  if (a.values.empty() || b.values.empty()) return r;
  r.values = fft::convolve_direct(a.values, b.values);
  return r;
}

std::vector<double> apply(const Kernel& k, const std::vector<double>& f) {
  if (k.values.empty() || f.empty()) return {};
  return fft::convolve(k.values, f);
}

FourierSup fourier_sup(const Kernel& k, int oversample) {
  if (oversample < 4) throw DomainError("fourier_sup: oversample must be >= 4");
  FourierSup out;
  if (k.values.empty()) return out;
  const std::size_t len = fft::good_size(static_cast<std::size_t>(oversample) * k.values.size());
  const auto mod = fft::dft_modulus(k.values, len);
  const auto it = std::max_element(mod.begin(), mod.end());
  out.value = *it;
  out.grid_spacing = 1.0 / static_cast<double>(len);
  out.theta = static_cast<double>(it - mod.begin()) / static_cast<double>(len);
  return out;
}

// ---------------------------------------------------------------------------
// Indicator expansion

const char* to_string(IdentityStatus s) {
  switch (s) {
    case IdentityStatus::holds:
      return "holds";
    case IdentityStatus::fails:
      return "fails";
    case IdentityStatus::indeterminate:
      return "indeterminate";
  }
  return "?";
}

namespace {
bool in_power_set(std::int64_t n, double c) {
  const std::int64_t k0 = floor_pow(static_cast<double>(n), c, true).floor;
  for (std::int64_t k = std::max<std::int64_t>(1, k0 - 1); k <= k0 + 2; ++k) {
    if (seq::floor_power(k, c) == n) return true;
  }
  return false;
}

// {-x} from the fractional part of x.
double neg_frac(const FracPow& x) { return x.frac == 0.0 ? 0.0 : 1.0 - x.frac; }

Precision max_prec(Precision a, Precision b) {
  return static_cast<std::uint8_t>(a) > static_cast<std::uint8_t>(b) ? a : b;
}
}  // namespace

SawtoothCheck sawtooth_identity_check(std::int64_t n, double c) {
  if (n < 1) throw DomainError("sawtooth_identity_check: n must be >= 1");
  if (!(c >= 1.0 && c < 2.0)) throw DomainError("sawtooth_identity_check: c must lie in [1, 2)");
  SawtoothCheck out;
  out.lhs = c == 1.0 ? 1 : (in_power_set(n, c) ? 1 : 0);
  const FracPow x0 = frac_pow(static_cast<double>(n), c, true);
  const FracPow x1 = frac_pow(static_cast<double>(n + 1), c, true);
  out.precision = max_prec(x0.precision, x1.precision);
  out.rhs = root_increment(static_cast<double>(n), c) + neg_frac(x1) - neg_frac(x0);
  if (!x0.resolved || !x1.resolved) {
    out.status = IdentityStatus::indeterminate;
  } else {
    out.status = std::abs(out.rhs - out.lhs) <= 1e-9 ? IdentityStatus::holds : IdentityStatus::fails;
  }
  return out;
}

double psi_truncated(double frac_t, double H) {
  const auto hmax = static_cast<std::int64_t>(std::floor(H));
  CompensatedSum<double> s;
  for (std::int64_t h = 1; h <= hmax; ++h) {
    const double hd = static_cast<double>(h);
    s.add(std::sin(2.0 * std::numbers::pi * std::fmod(hd * frac_t, 1.0)) / hd);
  }
  return -s.value() / std::numbers::pi;
}

double default_H(std::int64_t N, double c, double delta) {
  return std::pow(static_cast<double>(N), 2.0 - 2.0 / c + delta);
}

FourierPieces fourier_pieces(std::int64_t N, double c, double H) {
  if (N < 1024) throw DomainError("fourier_pieces: N must be >= 2^10");
  if (!(H >= 2.0)) throw DomainError("fourier_pieces: H must be >= 2");
  check_c(c, "fourier_pieces");
  FourierPieces fp;
  fp.N = N;
  fp.c = c;
  fp.H = H;
  const std::int64_t lo = half_start(N);
  const std::size_t len = static_cast<std::size_t>(N - lo + 1);
  auto blank = [&] {
    Kernel k;
    k.N = N;
    k.offset = lo;
    k.values.assign(len, 0.0);
    return k;
  };
  fp.indicator = blank();
  fp.indicator.count_unit = 1.0;
  fp.fs = blank();
  fp.f1 = blank();
  fp.f2 = blank();
  fp.E = blank();

  // Membership through the forward powers floor(k^c).
  for (std::int64_t k = std::max<std::int64_t>(1, floor_pow(static_cast<double>(N) / 2.0, c, true).floor - 1);; ++k) {
    const std::int64_t m = seq::floor_power(k, c);
    if (m > N) break;
    if (m >= lo) fp.indicator.values[static_cast<std::size_t>(m - lo)] = 1.0;
  }

  FracPow x0 = frac_pow(static_cast<double>(lo), c, true);
  double psiH0 = psi_truncated(neg_frac(x0), H);
  double err = 0.0;
  for (std::int64_t m = lo; m <= N; ++m) {
    const std::size_t i = static_cast<std::size_t>(m - lo);
    const FracPow x1 = frac_pow(static_cast<double>(m + 1), c, true);
    const double psiH1 = psi_truncated(neg_frac(x1), H);
    const double inc = root_increment(static_cast<double>(m), c);
    const double fs = std::pow(static_cast<double>(m), 1.0 / c - 1.0) / c;
    const double psidiff = psi_from_frac(neg_frac(x1)) - psi_from_frac(neg_frac(x0));
    fp.fs.values[i] = fs;
    fp.f1.values[i] = psiH1 - psiH0;
    fp.f2.values[i] = psidiff - fp.f1.values[i];
    fp.E.values[i] = inc - fs;
    const double sum = fp.fs.values[i] + fp.f1.values[i] + fp.f2.values[i] + fp.E.values[i];
    err = std::max(err, std::abs(sum - fp.indicator.values[i]));
    x0 = x1;
    psiH0 = psiH1;
  }
  fp.reconstruction_error = err;
  return fp;
}

// ---------------------------------------------------------------------------
// Correlation diagnostics

CorrelationGap correlation_gap(std::int64_t N, double c) {
  if (N < 1024) throw DomainError("correlation_gap: N must be >= 2^10");
  const Kernel A = power_average_kernel(N, c);
  const Kernel B = deterministic_main_kernel(N, c);
  const Kernel AA = correlate(A, A);
  const Kernel BB = correlate(B, B);
  CorrelationGap g;
  g.N = N;
  g.exact_counts = AA.count_unit.has_value();
  g.at_zero = AA.at(0);
  const double root = std::pow(static_cast<double>(N), 1.0 / c);
  const auto lo = static_cast<std::int64_t>(std::ceil(root));
  for (std::int64_t x = 1; x <= N; ++x) {
    if (x >= lo) {
      g.gap_main = std::max(g.gap_main, std::abs(AA.at(x) - BB.at(x)));
    } else {
      g.gap_small = std::max(g.gap_small, AA.at(x));
    }
  }
  // |x| = floor(root) belongs to the small range when root is not an integer.
  return g;
}

CorrelationDecomposition correlation_decompose(const Kernel& A, const Kernel& B, double alpha) {
  CorrelationDecomposition d;
  d.N = A.N;
  const Kernel corr = correlate(A, A);
  Kernel rho = correlate(B, B);
  rho.count_unit.reset();
  const double c0 = corr.at(0);
  if (!(c0 > 0.0)) throw DomainError("correlation_decompose: kernel has zero l2 mass");
  d.D = 1.0 / c0;
  if (0 >= rho.offset && 0 < rho.end()) rho.values[static_cast<std::size_t>(-rho.offset)] = 0.0;
  const double T = std::pow(static_cast<double>(A.N), 1.0 - alpha);
  const double N2 = static_cast<double>(A.N) * static_cast<double>(A.N);
  const std::int64_t lo = std::min(corr.offset, rho.offset);
  const std::int64_t hi = std::max(corr.end(), rho.end());
  for (std::int64_t x = lo; x < hi; ++x) {
    const double r = rho.at(x);
    d.rho_sup = std::max(d.rho_sup, std::abs(r));
    if (x == 0) continue;
    const double res = std::abs(corr.at(x) - r);
    const double ax = std::abs(static_cast<double>(x));
    if (ax >= T) {
      d.residual_sup = std::max(d.residual_sup, res);
      const double ax1 = std::abs(static_cast<double>(x + 1));
      if (ax1 >= T) d.lipschitz_estimate = std::max(d.lipschitz_estimate, std::abs(r - rho.at(x + 1)) * N2);
    } else {
      d.residual_small = std::max(d.residual_small, res);
    }
  }
  d.rho = std::move(rho);
  return d;
}

CorrelationDecomposition correlation_decompose(std::int64_t N, double c) {
  return correlation_decompose(power_average_kernel(N, c), deterministic_main_kernel(N, c), 1.0 - 1.0 / c);
}

CorrelationDecomposition correlation_decompose(const seq::IndicatorSeries& ind, std::int64_t N) {
  return correlation_decompose(random_average_kernel(ind, N), random_main_kernel(ind.alpha, N), ind.alpha);
}

KernelFamily deterministic_family(double c, const std::vector<std::int64_t>& scales) {
  KernelFamily fam;
  fam.scales = scales;
  for (auto N : scales) {
    fam.A.push_back(power_average_kernel(N, c));
    fam.B.push_back(deterministic_main_kernel(N, c));
    fam.E.push_back(subtract(fam.A.back(), fam.B.back()));
  }
  return fam;
}

KernelFamily random_family(const seq::IndicatorSeries& ind, const std::vector<std::int64_t>& scales) {
  KernelFamily fam;
  fam.scales = scales;
  for (auto N : scales) {
    fam.A.push_back(random_average_kernel(ind, N));
    fam.B.push_back(random_main_kernel(ind.alpha, N));
    fam.E.push_back(subtract(fam.A.back(), fam.B.back()));
  }
  return fam;
}

namespace {
// Output of k * f on [0, width), f supported on [0, f.size()).
std::vector<double> window_apply(const Kernel& k, const std::vector<double>& f, std::size_t width) {
  std::vector<double> out(width, 0.0);
  const auto full = apply(k, f);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const std::int64_t x = k.offset + static_cast<std::int64_t>(i);
    if (x >= 0 && static_cast<std::size_t>(x) < width) out[static_cast<std::size_t>(x)] = full[i];
  }
  return out;
}

double lp_norm(const std::vector<double>& v, int p) {
  CompensatedSum<double> s;
  for (double x : v) s.add(p == 1 ? std::abs(x) : x * x);
  return p == 1 ? s.value() : std::sqrt(s.value());
}
}  // namespace

TransferReport transfer_bound_check(const KernelFamily& fam, const std::vector<double>& f,
                                    const oscfun::OscillationFunctional& functional, int p) {
  if (p != 1 && p != 2) throw DomainError("transfer_bound_check: p must be 1 or 2");
  if (fam.scales.empty()) throw DomainError("transfer_bound_check: empty kernel family");
  functional.validate();
  TransferReport rep;
  rep.p = p;
  rep.kind = functional.kind;
  oscfun::OscillationFunctional main = functional;
  switch (functional.kind) {
    case oscfun::Kind::jump:
      rep.constant = 4.0;
      main.epsilon = functional.epsilon / 4.0;
      break;
    case oscfun::Kind::oscillation:
      rep.constant = 3.0;
      for (auto b : functional.breakpoints) {
        if (b >= fam.scales.size()) throw DomainError("transfer_bound_check: breakpoint beyond the scale list");
      }
      break;
    default:
      rep.constant = 2.0;
      break;
  }
  std::int64_t maxN = 0;
  for (auto N : fam.scales) maxN = std::max(maxN, N);
  const std::size_t width = f.size() + static_cast<std::size_t>(maxN) + 1;
  const std::size_t S = fam.scales.size();
  std::vector<std::vector<double>> af(S), bf(S), ef(S);
  for (std::size_t i = 0; i < S; ++i) {
    af[i] = window_apply(fam.A[i], f, width);
    bf[i] = window_apply(fam.B[i], f, width);
    ef[i] = window_apply(fam.E[i], f, width);
    rep.rhs_error += lp_norm(ef[i], p);
  }
  std::vector<double> lhs(width), rhs(width), sa(S), sb(S);
  for (std::size_t x = 0; x < width; ++x) {
    for (std::size_t i = 0; i < S; ++i) {
      sa[i] = af[i][x];
      sb[i] = bf[i][x];
    }
    lhs[x] = oscfun::evaluate(functional, sa);
    rhs[x] = oscfun::evaluate(main, sb);
  }
  rep.lhs = lp_norm(lhs, p);
  rep.rhs_main = lp_norm(rhs, p);
  rep.holds = rep.lhs <= (rep.rhs_main + rep.constant * rep.rhs_error) * (1.0 + 1e-9) + 1e-300;

  std::vector<double> Ns;
  for (std::size_t i = 0; i < S; ++i) {
    rep.ehat_sup.push_back(fourier_sup(fam.E[i]).value);
    Ns.push_back(static_cast<double>(fam.scales[i]));
  }
  const bool positive = std::all_of(rep.ehat_sup.begin(), rep.ehat_sup.end(), [](double v) { return v > 0.0; });
  if (S >= 2 && positive) rep.ehat_slope = fit::fit_slope(Ns, rep.ehat_sup).slope;
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_json(const Kernel& k) {
  nlohmann::json j;
  j["offset"] = k.offset;
  j["N"] = k.N;
  j["normalization"] = to_string(k.normalization);
  j["half"] = k.half;
  j["values"] = k.values;
  return j.dump();
}

Kernel kernel_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Kernel k;
  try {
    k.offset = j.at("offset").get<std::int64_t>();
    k.N = j.at("N").get<std::int64_t>();
    k.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    k.values = j.at("values").get<std::vector<double>>();
    if (j.contains("half")) k.half = j["half"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("kernel JSON: ") + e.what());
  }
  for (double v : k.values) {
    if (!std::isfinite(v)) throw ConfigError("kernel JSON: values must be finite");
  }
  return k;
}

namespace {
constexpr char kMagic[4] = {'S', 'K', 'R', 'N'};
constexpr std::uint32_t kBinaryVersion = 1;

template <class T>
void put_le(std::string& out, T v) {
  auto u = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>>(v);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>(u & 0xff));
    if constexpr (sizeof(T) > 1) u >>= 8;
  }
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ConfigError("kernel binary: truncated block");
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  U u = 0;
  for (std::size_t b = sizeof(T); b-- > 0;) u = static_cast<U>((u << 8) | static_cast<unsigned char>(in[pos + b]));
  pos += sizeof(T);
  return std::bit_cast<T>(u);
}
}  // namespace

std::string to_binary(const Kernel& k) {
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kBinaryVersion);
  put_le<std::int64_t>(out, k.offset);
  put_le<std::int64_t>(out, k.N);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(k.normalization));
  put_le<std::uint8_t>(out, k.half ? 1 : 0);
  put_le<std::uint64_t>(out, k.values.size());
  for (double v : k.values) put_le<double>(out, v);
  return out;
}

Kernel kernel_from_binary(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw ConfigError("kernel binary: bad magic");
  std::size_t pos = 4;
  if (get_le<std::uint32_t>(bytes, pos) != kBinaryVersion) throw ConfigError("kernel binary: unsupported version");
  Kernel k;
  k.offset = get_le<std::int64_t>(bytes, pos);
  k.N = get_le<std::int64_t>(bytes, pos);
  const auto norm = get_le<std::uint8_t>(bytes, pos);
  if (norm > static_cast<std::uint8_t>(Normalization::empirical)) throw ConfigError("kernel binary: bad normalization");
  k.normalization = static_cast<Normalization>(norm);
  k.half = get_le<std::uint8_t>(bytes, pos) != 0;
  const auto count = get_le<std::uint64_t>(bytes, pos);
  if (bytes.size() - pos != count * 8) throw ConfigError("kernel binary: value count does not match block size");
  k.values.resize(count);
  for (auto& v : k.values) v = get_le<double>(bytes, pos);
  return k;
}

std::string to_csv(const Kernel& k, bool skip_zeros) {
  std::ostringstream os;
  os.precision(17);
  os << "x,value\n";
  for (std::size_t i = 0; i < k.values.size(); ++i) {
    if (skip_zeros && k.values[i] == 0.0) continue;
    os << (k.offset + static_cast<std::int64_t>(i)) << ',' << k.values[i] << '\n';
  }
  return os.str();
}

}  // namespace sparse_ergodic::kernels
