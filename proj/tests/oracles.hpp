#pragma once
// Slow reference implementations. Nothing here calls into the library's
// numerical code; they only share the data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

// Every index subset of a short series, as a bit mask walked low to high.
template <class Visit>
void for_each_subset(std::size_t n, Visit&& visit) {
  std::vector<std::size_t> idx;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) idx.push_back(i);
    }
    visit(idx);
  }
}

inline std::int64_t jump_count(std::span<const double> a, double eps) {
  std::int64_t best = 0;
  for_each_subset(a.size(), [&](const std::vector<std::size_t>& t) {
    for (std::size_t j = 1; j < t.size(); ++j) {
      if (!(std::abs(a[t[j]] - a[t[j - 1]]) > eps)) return;
    }
    best = std::max(best, static_cast<std::int64_t>(t.size()) - 1);
  });
  return best;
}

inline double variation(std::span<const double> a, double r) {
  double best = 0.0;
  if (std::isinf(r)) {
    for (double x : a)
      for (double y : a) best = std::max(best, std::abs(x - y));
    return best;
  }
  const std::size_t n = a.size();
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = std::pow(std::abs(a[i] - a[j]), r);
  for_each_subset(n, [&](const std::vector<std::size_t>& t) {
    double s = 0.0;
    for (std::size_t j = 1; j < t.size(); ++j) s += w[t[j - 1] * n + t[j]];
    best = std::max(best, s);
  });
  return std::pow(best, 1.0 / r);
}

// sup over every choice N_j in [M_j, M_{j+1}] of the l2 norm of a_{N_j} - a_{M_j}
inline double oscillation(std::span<const double> a, std::span<const std::size_t> bps) {
  const std::size_t J = bps.size() - 1;
  std::vector<std::size_t> pick(J);
  for (std::size_t j = 0; j < J; ++j) pick[j] = bps[j];
  double best = 0.0;
  for (;;) {
    double s = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double d = a[pick[j]] - a[bps[j]];
      s += d * d;
    }
    best = std::max(best, s);
    std::size_t j = 0;
    while (j < J && pick[j] == bps[j + 1]) {
      pick[j] = bps[j];
      ++j;
    }
    if (j == J) break;
    ++pick[j];
  }
  return std::sqrt(best);
}

using Wide = boost::multiprecision::cpp_bin_float_100;

// sum_n w(n) e(theta n + sum_j coef_j (n + shift_j)^exponent_j) at 100 digits
struct WideTerm {
  double coef, shift, exponent;
};

template <class Weight>
std::complex<double> exp_sum(std::int64_t lo, std::int64_t hi, double theta, const std::vector<WideTerm>& terms,
                             Weight&& w) {
  const Wide two_pi = 2 * boost::math::constants::pi<Wide>();
  Wide re = 0, im = 0;
  for (std::int64_t n = lo; n <= hi; ++n) {
    Wide ph = Wide(theta) * n;
    for (const auto& t : terms) ph += Wide(t.coef) * pow(Wide(n) + Wide(t.shift), Wide(t.exponent));
    ph -= floor(ph);
    const double wn = w(n);
    re += wn * cos(two_pi * ph);
    im += wn * sin(two_pi * ph);
  }
  return {re.convert_to<double>(), im.convert_to<double>()};
}

inline std::int64_t floor_power(std::int64_t k, double c) {
  // exact powers can land a few ulps below the integer at 100 digits
  return static_cast<std::int64_t>(floor(pow(Wide(k), Wide(c)) + Wide("1e-80")).convert_to<long long>());
}

// terms floor(k^c) lying in (lo, hi]
inline std::vector<std::int64_t> floor_power_terms(std::int64_t lo, std::int64_t hi, double c) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 1;; ++k) {
    const auto v = floor_power(k, c);
    if (v > hi) break;
    if (v > lo) out.push_back(v);
  }
  return out;
}

// |{(n, m) : a_n - a_m = x}| among the terms in (N/2, N]
inline std::map<std::int64_t, std::int64_t> pair_counts(std::int64_t N, double c) {
  const auto t = floor_power_terms(N / 2, N, c);
  std::map<std::int64_t, std::int64_t> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) ++out[t[i] - t[j]];
  return out;
}

inline std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<long double> acc(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += static_cast<long double>(a[i]) * b[j];
  return {acc.begin(), acc.end()};
}

// Centered Hardy-Littlewood maximal function, every radius up to rmax.
inline double hl_maximal_at(const std::map<std::int64_t, double>& f, std::int64_t x, std::int64_t rmax) {
  double best = 0.0;
  for (std::int64_t r = 0; r <= rmax; ++r) {
    double m = 0.0;
    for (const auto& [p, v] : f) {
      if (p >= x - r && p <= x + r) m += std::abs(v);
    }
    best = std::max(best, m / static_cast<double>(2 * r + 1));
  }
  return best;
}

// Largest number of blocks [t_i, t_j] along a breakpoint chain whose
// exceedance density reaches tau; rows[x][k] is the average at time k.
inline std::int64_t census(const std::vector<std::vector<double>>& rows, double tau) {
  const std::size_t T = rows.empty() ? 0 : rows.front().size();
  std::int64_t best = 0;
  for_each_subset(T, [&](const std::vector<std::size_t>& chain) {
    std::int64_t blocks = 0;
    for (std::size_t b = 1; b < chain.size(); ++b) {
      std::size_t hit = 0;
      for (const auto& row : rows) {
        double dev = 0.0;
        for (std::size_t k = chain[b - 1]; k < chain[b]; ++k) dev = std::max(dev, std::abs(row[k] - row[chain[b]]));
        if (dev >= tau) ++hit;
      }
      if (static_cast<double>(hit) / static_cast<double>(rows.size()) < tau) return;
      ++blocks;
    }
    best = std::max(best, blocks);
  });
  return best;
}

}  // namespace oracle
