#include "sparse_ergodic/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/fft.hpp"
#include "sparse_ergodic/precision.hpp"
#include "sparse_ergodic/seq.hpp"

namespace sparse_ergodic::expsum {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

long double frac_ld(long double v) { return v - std::floor(v); }

Complex unit(double frac) { return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)}; }
}  // namespace

double PhaseSum::phase_frac(std::int64_t n) const {
  long double f = frac_ld(static_cast<long double>(theta) * static_cast<long double>(n));
  for (const auto& t : terms) {
    const long double base = static_cast<long double>(n) + static_cast<long double>(t.shift);
    const long double p = static_cast<long double>(t.coef) * std::pow(base, static_cast<long double>(t.exponent));
    f += frac_ld(p);
  }
  return static_cast<double>(frac_ld(f));
}

Complex exp_sum_direct(const PhaseSum& ps) {
  if (ps.length() > kMaxDirectLength) throw DomainError("exp_sum_direct: range longer than 2^24");
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  const double Nd = static_cast<double>(ps.N);
  for (std::int64_t n = ps.lo; n <= ps.hi; ++n) {
    const double a = ps.cutoff(static_cast<double>(n) / Nd);
    if (a == 0.0) continue;
    const Complex z = unit(ps.phase_frac(n));
    re.add(a * z.real());
    im.add(a * z.imag());
  }
  return {re.value(), im.value()};
}

double amplitude_mass(const PhaseSum& ps) {
  CompensatedSum<double> s;
  for (std::int64_t n = ps.lo; n <= ps.hi; ++n) s.add(std::abs(ps.cutoff(static_cast<double>(n) / static_cast<double>(ps.N))));
  return s.value();
}

double vdc_bound(double lambda, double v, std::int64_t interval_length) {
  if (!(lambda > 0.0)) throw DomainError("vdc_bound: lambda must be > 0");
  if (!(v >= 1.0)) throw DomainError("vdc_bound: v must be >= 1");
  return v * static_cast<double>(interval_length) * std::sqrt(lambda) + 1.0 / std::sqrt(lambda);
}

VdcResult vdc_certify(double lambda, double v, const PhaseSum& ps) {
  VdcResult r;
  r.bound = vdc_bound(lambda, v, ps.length());
  r.direct = std::abs(exp_sum_direct(ps));
  r.ratio = r.direct / r.bound;
  return r;
}

// ---------------------------------------------------------------------------
// Two-frequency sums

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("twofreq: precondition violated: " + what);
}

std::int64_t upper_t(const TwoFreqParams& p) { return p.t == 0 ? p.N : p.t; }
}  // namespace

PhaseSum twofreq_phase(const TwoFreqParams& p) {
  require(p.which >= 1 && p.which <= 3, "case must be 1, 2 or 3");
  require(p.N >= 4, "N >= 4");
  require(p.c > 1.0 && p.c < 2.0, "1 < c < 2");
  require(p.theta >= 0.0 && p.theta < 1.0, "0 <= theta < 1");
  const std::int64_t t = upper_t(p);
  require(t > p.N / 2 && t <= p.N, "N/2 < t <= N");
  const double N = static_cast<double>(p.N);
  const double e = 1.0 / p.c;
  PhaseSum ps;
  ps.lo = p.N / 2 + 1;
  ps.hi = t;
  ps.theta = p.theta;
  ps.N = p.N;
  ps.cutoff = p.cutoff;
  if (p.which == 1) {
    require(p.u >= 0.0 && p.u <= 1.0, "0 <= u <= 1");
    require(std::abs(p.h) >= 1.0 && std::abs(p.h) <= N, "1 <= |h| <= N");
    ps.terms = {{-p.h, p.u, e}};
    return ps;
  }
  require(p.u1 >= 0.0 && p.u1 <= 1.0 && p.u2 >= 0.0 && p.u2 <= 1.0, "0 <= u1, u2 <= 1");
  require(p.x >= 1.0 && p.x <= N, "1 <= x <= N");
  const double a1 = std::abs(p.h1);
  const double a2 = std::abs(p.h2);
  if (p.which == 2) {
    require(a2 >= 1.0, "1 <= |h2|");
    require(a2 <= a1, "|h2| <= |h1|");
    require(a1 <= N, "|h1| <= N");
    require(p.N0 > 1.0 && p.N0 <= N, "1 < N0 <= N");
  } else {
    require(p.H > std::pow(N, 2.0 - 2.0 / p.c) && p.H <= N, "N^(2-2/c) < H <= N");
    require(a2 >= 1.0, "1 <= |h2|");
    require((1.0 + 100.0 * p.x / N) * a2 <= a1, "(1 + 100|x|/N)|h2| <= |h1|");
    require(a1 <= p.H, "|h1| <= H");
    require(std::abs(p.h1 + p.h2) >= 100.0 * p.x * a2 / N, "|h1 + h2| >= 100|x||h2|/N");
  }
  ps.terms = {{p.h1, p.u1, e}, {p.h2, p.x + p.u2, e}};
  return ps;
}

double twofreq_bound(const TwoFreqParams& p) {
  const double N = static_cast<double>(p.N);
  const double c = p.c;
  switch (p.which) {
    case 1: {
      const double h = std::abs(p.h);
      return std::pow(N, 1.0 / (2.0 * c)) * std::sqrt(h) + std::pow(N, 1.0 - 1.0 / (2.0 * c)) / std::sqrt(h);
    }
    case 2: {
      const double a1 = std::abs(p.h1);
      const double a2 = std::abs(p.h2);
      const double x = std::abs(p.x);
      return p.N0 + a1 / std::sqrt(a2) * std::pow(N, 1.0 + 1.0 / (2.0 * c)) / std::sqrt(x * p.N0) +
             std::pow(N, 2.0 - 1.0 / (2.0 * c)) / std::sqrt(a2 * x * p.N0);
    }
    default:
      return std::sqrt(p.H) * std::pow(N, 1.0 / (2.0 * c));
  }
}

BoundCheck twofreq_check(const TwoFreqParams& p) {
  const PhaseSum ps = twofreq_phase(p);
  BoundCheck b;
  b.direct = std::abs(exp_sum_direct(ps));
  b.bound = twofreq_bound(p);
  return b;
}

// ---------------------------------------------------------------------------
// Sawtooth expansion

double norm_dist(double t) {
  const long double v = static_cast<long double>(t);
  const long double d = std::abs(v - std::nearbyint(v));
  return static_cast<double>(d);
}

PsiExpansion psi_expand(double t, double H) {
  if (!(H >= 2.0)) throw DomainError("psi_expand: H must be >= 2");
  PsiExpansion out;
  const long double tl = static_cast<long double>(t);
  const double fr = static_cast<double>(tl - std::floor(tl));
  out.at_jump = fr == 0.0;
  out.exact = fr - 0.5;
  const auto hmax = static_cast<std::int64_t>(std::floor(H));
  // -(1/2 pi i) sum_{1<=|h|<=H} e(ht)/h, both signs summed explicitly.
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  for (std::int64_t h = 1; h <= hmax; ++h) {
    const double hd = static_cast<double>(h);
    const double ph = std::fmod(hd * fr, 1.0);
    const Complex plus = unit(ph) / hd;
    const Complex minus = unit(-ph) / (-hd);
    re.add(plus.real() + minus.real());
    im.add(plus.imag() + minus.imag());
  }
  const Complex s{re.value(), im.value()};
  const Complex val = s / Complex(0.0, -kTwoPi);  // multiply by -1/(2 pi i)
  if (std::abs(val.imag()) > 1e-12) {
    throw std::logic_error("psi_expand: truncated series has imaginary part " + std::to_string(val.imag()));
  }
  out.truncated = val.real();
  const double d = norm_dist(t);
  out.tail_bound = d == 0.0 ? 1.0 : std::min(1.0, 1.0 / (H * d));
  out.error = std::abs(out.exact - out.truncated);
  return out;
}

double tail_coefficient(std::int64_t h, double H) {
  if (!(H >= 2.0)) throw DomainError("tail_coefficient: H must be >= 2");
  const std::int64_t a = h < 0 ? -h : h;
  // b_h = 2 int_0^{1/2} min(1, 1/(H t)) cos(2 pi h t) dt (even function).
  const double t0 = 1.0 / H;
  if (a == 0) return 2.0 * (t0 + std::log(0.5 * H) / H);
  const double hd = static_cast<double>(a);
  double inner = std::sin(kTwoPi * hd * t0) / (kTwoPi * hd);
  // Integrate cos(2 pi h t)/(H t) over [1/H, 1/2] in pieces of one half period.
  const double step = 0.5 / hd;
  double lo = t0;
  double outer = 0.0;
  while (lo < 0.5) {
    const double hi = std::min(0.5, lo + step);
    outer += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return std::cos(kTwoPi * hd * t) / (H * t); }, lo, hi, 0, 1e-13);
    lo = hi;
  }
  return 2.0 * (inner + outer);
}

CoefficientDecay coefficient_decay(double H, std::int64_t h_max) {
  CoefficientDecay d;
  d.H = H;
  d.h_max = h_max;
  const double small = std::log(H) / H;
  for (std::int64_t h = 0; h <= h_max; ++h) {
    const double b = tail_coefficient(h, H);
    d.b.push_back(b);
    const double hd = static_cast<double>(h);
    const double maj = h == 0 ? small : std::min(small, H / (hd * hd));
    d.worst_ratio = std::max(d.worst_ratio, std::abs(b) / maj);
  }
  return d;
}

MinSum min_sum_check(std::int64_t N, double u, double c, double delta) {
  if (!(c > 1.0 && c < 1.2)) throw DomainError("min_sum_check: c must lie in (1, 6/5)");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("min_sum_check: u must lie in [0, 1)");
  if (N < 2) throw DomainError("min_sum_check: N must be >= 2");
  MinSum m;
  m.N = N;
  m.u = u;
  const double Nd = static_cast<double>(N);
  m.H = std::pow(Nd, 2.0 - 2.0 / c + delta);
  m.majorant = std::pow(Nd, 2.0 / c - 1.0 - delta / 2.0);
  CompensatedSum<double> s;
  for (std::int64_t n = N + 1; n <= 2 * N; ++n) {
    const FracPow fp = frac_pow(static_cast<double>(n) + u, c, true);
    const double d = std::min(fp.frac, 1.0 - fp.frac);
    s.add(d == 0.0 ? 1.0 : std::min(1.0, 1.0 / (m.H * d)));
  }
  m.value = s.value();
  return m;
}

// ---------------------------------------------------------------------------
// Sigma split

namespace {

// Rows e(h {k^(1/c)}) for k in [N/2+1, N+1], cached by h >= 1.
class PhaseRows {
 public:
  PhaseRows(std::int64_t N, double c) : lo_(N / 2 + 1) {
    const std::int64_t hi = N + 1;
    frac_.resize(static_cast<std::size_t>(hi - lo_ + 1));
    for (std::int64_t k = lo_; k <= hi; ++k) {
      frac_[static_cast<std::size_t>(k - lo_)] = frac_pow(static_cast<double>(k), c, true).frac;
    }
  }
  const std::vector<Complex>& row(std::int64_t h) {
    auto it = std::find_if(rows_.begin(), rows_.end(), [h](const auto& r) { return r.first == h; });
    if (it != rows_.end()) return it->second;
    if (rows_.size() >= 64) rows_.erase(rows_.begin());
    std::vector<Complex> r(frac_.size());
    const double hd = static_cast<double>(h);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = unit(std::fmod(hd * frac_[i], 1.0));
    rows_.emplace_back(h, std::move(r));
    return rows_.back().second;
  }
  std::int64_t lo() const { return lo_; }

 private:
  std::int64_t lo_;
  std::vector<double> frac_;
  std::vector<std::pair<std::int64_t, std::vector<Complex>>> rows_;
};

double K_from_rows(PhaseRows& rows, std::int64_t N, std::int64_t x, std::int64_t h1, std::int64_t h2) {
  // m ranges over N/2 < m <= N and N/2 < m + x <= N.
  const std::int64_t mlo = std::max(N / 2 + 1, N / 2 + 1 - x);
  const std::int64_t mhi = std::min(N, N - x);
  if (mhi < mlo) return 0.0;
  const auto& r1 = rows.row(std::abs(h1));
  const std::vector<Complex> r1c = r1;  // row() may evict; keep a copy
  const auto& r2 = rows.row(std::abs(h2));
  const bool c1 = h1 < 0;
  const bool c2 = h2 < 0;
  double total = 0.0;
  for (int u = 0; u <= 1; ++u) {
    for (int v = 0; v <= 1; ++v) {
      CompensatedSum<double> re;
      CompensatedSum<double> im;
      for (std::int64_t m = mlo; m <= mhi; ++m) {
        Complex a = r2[static_cast<std::size_t>(m + x + u - rows.lo())];
        Complex b = r1c[static_cast<std::size_t>(m + v - rows.lo())];
        if (c2) a = std::conj(a);
        if (c1) b = std::conj(b);
        const Complex z = a * b;
        re.add(z.real());
        im.add(z.imag());
      }
      total += std::hypot(re.value(), im.value());
    }
  }
  return total;
}

enum class Region { one, two, three };

Region classify(std::int64_t N, std::int64_t x, std::int64_t h1, std::int64_t h2) {
  const double a1 = static_cast<double>(std::abs(h1));
  const double a2 = static_cast<double>(std::abs(h2));
  const double ax = static_cast<double>(std::abs(x));
  const double Nd = static_cast<double>(N);
  if (a2 <= Nd / (100.0 * ax)) return Region::one;
  if (a1 - a2 <= 100.0 * ax * a2 / Nd) return Region::two;
  return Region::three;
}

}  // namespace

double K_value(std::int64_t N, std::int64_t x, double c, std::int64_t h1, std::int64_t h2) {
  PhaseRows rows(N, c);
  return K_from_rows(rows, N, x, h1, h2);
}

SigmaSplit sigma_split(std::int64_t N, std::int64_t x, double c, double delta, std::int64_t sample_budget,
                       std::uint64_t seed) {
  if (sample_budget < kMinSigmaBudget) {
    throw DomainError("sigma_split: sample budget " + std::to_string(sample_budget) + " is below the minimum " +
                      std::to_string(kMinSigmaBudget));
  }
  if (!(c > 1.0 && c < 2.0)) throw DomainError("sigma_split: c must lie in (1, 2)");
  const double Nd = static_cast<double>(N);
  const double ax = static_cast<double>(std::abs(x));
  if (ax < std::pow(Nd, 1.0 / c) || ax > Nd) throw DomainError("sigma_split: need N^(1/c) <= |x| <= N");
  SigmaSplit s;
  s.N = N;
  s.x = x;
  s.H = std::pow(Nd, 2.0 - 2.0 / c + delta);
  s.bound1 = std::pow(Nd, 1.5 - 1.0 / c);
  s.bound2 = std::pow(Nd, 1.0 - 1.0 / (3.0 * c) + delta);
  s.bound3 = std::pow(Nd, 1.0 - 1.0 / (2.0 * c) + delta);
  s.diagonal_bound = s.bound1;
  const auto Hmax = static_cast<std::int64_t>(std::floor(s.H));
  const std::int64_t core = std::min(Hmax, kExactCore);
  PhaseRows rows(N, c);

  auto add = [&](Region r, double v) {
    (r == Region::one ? s.sigma1 : r == Region::two ? s.sigma2 : s.sigma3) += v;
  };
  // Exact core: 1 <= |h2| <= |h1| <= core. K(-h1,-h2) = K(h1,h2).
  for (std::int64_t h1 = 1; h1 <= core; ++h1) {
    for (std::int64_t a2 = 1; a2 <= h1; ++a2) {
      for (std::int64_t h2 : {a2, -a2}) {
        const double K = K_from_rows(rows, N, x, h1, h2);
        const double w = 2.0 * K / static_cast<double>(h1 * a2);
        add(classify(N, x, h1, h2), w);
        if (h2 == -h1) s.diagonal_sum += w;
        s.K_table.push_back({h1, h2, K});
      }
    }
  }
  if (Hmax > core) {
    // Stratified log-uniform sampling over dyadic blocks of h1 beyond the core.
    s.exact = false;
    std::vector<std::pair<std::int64_t, std::int64_t>> strata;
    for (std::int64_t b = core + 1; b <= Hmax; b *= 2) strata.emplace_back(b, std::min(Hmax, 2 * b - 1));
    const std::int64_t per = std::max<std::int64_t>(16, sample_budget / static_cast<std::int64_t>(strata.size()));
    constexpr int kBatches = 8;
    double var1 = 0.0;
    double var2 = 0.0;
    double var3 = 0.0;
    std::uint64_t draw = 0;
    for (const auto& [lo, hi] : strata) {
      // pairs in stratum: sum_{h1=lo}^{hi} 2 * h1 (two signs of h2), times 2 for the sign of h1
      const double lod = static_cast<double>(lo);
      const double hid = static_cast<double>(hi);
      // normalizer of p(h1) ~ log(1 + 1/h1) telescopes
      const double norm = std::log((hid + 1.0) / lod);
      double batch[3][kBatches] = {};
      const std::int64_t per_batch = std::max<std::int64_t>(1, per / kBatches);
      for (int b = 0; b < kBatches; ++b) {
        for (std::int64_t i = 0; i < per_batch; ++i) {
          const double u1 = counter_uniform(seed, streams::sigma_sampling, draw++);
          const double u2 = counter_uniform(seed, streams::sigma_sampling, draw++);
          const double u3 = counter_uniform(seed, streams::sigma_sampling, draw++);
          // h1 with probability proportional to h1 (number of h2 partners); log-uniform proposal
          const double lh = std::log(lod) + u1 * (std::log(hid + 1.0) - std::log(lod));
          const auto h1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::exp(lh)), lo, hi);
          const auto a2 = std::clamp<std::int64_t>(1 + static_cast<std::int64_t>(u2 * static_cast<double>(h1)), 1, h1);
          const std::int64_t h2 = u3 < 0.5 ? a2 : -a2;
          // density of (h1, h2): p(h1) * 1/(2 h1); p(h1) ~ 1/h1 normalized over the stratum
          const double ph1 = std::log1p(1.0 / static_cast<double>(h1)) / norm;
          const double p = ph1 / (2.0 * static_cast<double>(h1));
          const double K = K_from_rows(rows, N, x, h1, h2);
          const double w = 2.0 * K / static_cast<double>(h1 * a2);  // both signs of h1
          const int r = static_cast<int>(classify(N, x, h1, h2));
          batch[r][b] += w / p / static_cast<double>(per_batch);
        }
      }
      double* sums[3] = {&s.sigma1, &s.sigma2, &s.sigma3};
      double* vars[3] = {&var1, &var2, &var3};
      for (int r = 0; r < 3; ++r) {
        double mean = 0.0;
        for (double v : batch[r]) mean += v / kBatches;
        double ss = 0.0;
        for (double v : batch[r]) ss += (v - mean) * (v - mean);
        *sums[r] += mean;
        *vars[r] += ss / (kBatches - 1) / kBatches;
      }
    }
    s.err1 = std::sqrt(var1);
    s.err2 = std::sqrt(var2);
    s.err3 = std::sqrt(var3);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Counting function

namespace {
std::vector<std::int64_t> support_points(std::int64_t N, double c) {
  const auto k = kernels::power_average_kernel(N, c);
  std::vector<std::int64_t> pts;
  for (std::size_t i = 0; i < k.values.size(); ++i) {
    if (k.values[i] != 0.0) pts.push_back(k.offset + static_cast<std::int64_t>(i));
  }
  return pts;
}

void finish(CountingHistogram& h) {
  h.max_count = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const std::int64_t x = h.x_lo + static_cast<std::int64_t>(i);
    if (x >= 1 && h.counts[i] > h.max_count) {
      h.max_count = h.counts[i];
      h.argmax = x;
    }
  }
}
}  // namespace

CountingHistogram counting_function(std::int64_t N, double c, std::int64_t x_lo, std::int64_t x_hi) {
  if (N > (std::int64_t{1} << 22)) throw DomainError("counting_function: N must be <= 2^22");
  if (x_hi < x_lo) throw DomainError("counting_function: empty x range");
  const auto pts = support_points(N, c);
  CountingHistogram h;
  h.N = N;
  h.c = c;
  h.x_lo = x_lo;
  h.support_size = static_cast<std::int64_t>(pts.size());
  h.counts.assign(static_cast<std::size_t>(x_hi - x_lo + 1), 0);
  if (pts.empty()) return h;
  const std::int64_t base = pts.front();
  std::vector<std::int64_t> ind(static_cast<std::size_t>(pts.back() - base + 1), 0);
  for (auto p : pts) ind[static_cast<std::size_t>(p - base)] = 1;
  std::vector<std::int64_t> rev(ind.rbegin(), ind.rend());
  const auto cc = fft::convolve_counts(ind, rev);
  if (!cc.exact) throw std::runtime_error("counting_function: FFT counts not exact");
  const std::int64_t zero = static_cast<std::int64_t>(ind.size()) - 1;  // index of lag 0
  for (std::int64_t x = x_lo; x <= x_hi; ++x) {
    if (x <= 0) continue;  // strict m < n
    const std::int64_t idx = zero + x;
    if (idx < static_cast<std::int64_t>(cc.values.size())) {
      h.counts[static_cast<std::size_t>(x - x_lo)] = cc.values[static_cast<std::size_t>(idx)];
    }
  }
  finish(h);
  return h;
}

CountingHistogram counting_function_pairs(std::int64_t N, double c, std::int64_t x_lo, std::int64_t x_hi) {
  if (N > (std::int64_t{1} << 13)) throw DomainError("counting_function_pairs: N must be <= 2^13");
  if (x_hi < x_lo) throw DomainError("counting_function_pairs: empty x range");
  CountingHistogram h;
  h.N = N;
  h.c = c;
  h.x_lo = x_lo;
  h.counts.assign(static_cast<std::size_t>(x_hi - x_lo + 1), 0);
  // Enumerate n directly rather than through the kernel.
  std::vector<std::int64_t> a;
  for (std::int64_t n = 1;; ++n) {
    const std::int64_t v = seq::floor_power(n, c);
    if (v > N) break;
    if (v > N / 2) a.push_back(v);
  }
  h.support_size = static_cast<std::int64_t>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const std::int64_t x = a[i] - a[j];
      if (x >= x_lo && x <= x_hi) ++h.counts[static_cast<std::size_t>(x - x_lo)];
    }
  }
  finish(h);
  return h;
}

double gk_increment_ratio(std::int64_t N, double c, std::int64_t k_max) {
  const long double cl = c;
  const long double Nd = static_cast<long double>(N);
  const long double scale = std::pow(Nd, 1.0L - 2.0L / cl);
  const auto lo = static_cast<std::int64_t>(std::floor(std::pow(Nd / 2.0L, 1.0L / cl)));
  const auto hi = static_cast<std::int64_t>(std::floor(std::pow(Nd, 1.0L / cl)));
  auto g = [cl](long double n, long double k) { return std::pow(n, cl) - std::pow(n - k, cl); };
  double worst = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const long double kd = static_cast<long double>(k);
    for (std::int64_t n = lo + k + 1; n < hi; ++n) {
      const long double nd = static_cast<long double>(n);
      const long double inc = g(nd + 1.0L, kd) - g(nd, kd);
      worst = std::min(worst, static_cast<double>(inc / (kd * scale)));
    }
  }
  return worst;
}

std::string to_csv(const std::vector<TwoFreqParams>& params, const std::vector<BoundCheck>& checks) {
  std::ostringstream os;
  os.precision(12);
  os << "case,N,c,theta,t,h,u,h1,h2,u1,u2,x,N0,H,direct,bound,ratio\n";
  for (std::size_t i = 0; i < params.size() && i < checks.size(); ++i) {
    const auto& p = params[i];
    os << p.which << ',' << p.N << ',' << p.c << ',' << p.theta << ',' << upper_t(p) << ',' << p.h << ',' << p.u
       << ',' << p.h1 << ',' << p.h2 << ',' << p.u1 << ',' << p.u2 << ',' << p.x << ',' << p.N0 << ',' << p.H << ','
       << checks[i].direct << ',' << checks[i].bound << ',' << checks[i].ratio() << '\n';
  }
  return os.str();
}

std::string to_csv(const CountingHistogram& h) {
  std::ostringstream os;
  os << "x,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) os << (h.x_lo + static_cast<std::int64_t>(i)) << ',' << h.counts[i] << '\n';
  return os.str();
}

}  // namespace sparse_ergodic::expsum
