#include "sparse_ergodic/seq.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/precision.hpp"

namespace sparse_ergodic::seq {

std::size_t SparseSequence::count_up_to(std::int64_t m) const {
  return static_cast<std::size_t>(std::upper_bound(terms.begin(), terms.end(), m) - terms.begin());
}

std::int64_t IndicatorSeries::mass(std::int64_t lo, std::int64_t hi) const {
  lo = std::clamp<std::int64_t>(lo, 0, n_max());
  hi = std::clamp<std::int64_t>(hi, 0, n_max());
  if (hi <= lo) return 0;
  const std::int64_t upper = partial_sums[static_cast<std::size_t>(hi - 1)];
  const std::int64_t lower = lo == 0 ? 0 : partial_sums[static_cast<std::size_t>(lo - 1)];
  return upper - lower;
}

double IndicatorSeries::expected_mass(std::int64_t lo, std::int64_t hi) const {
  CompensatedSum<double> acc;
  for (std::int64_t n = std::max<std::int64_t>(lo + 1, 1); n <= hi; ++n) {
    acc.add(std::pow(static_cast<double>(n), -alpha));
  }
  return acc.value();
}

ExhaustedError::ExhaustedError(std::int64_t requested, std::int64_t available)
    : std::runtime_error("hitting_times: indicators exhausted; requested " +
                         std::to_string(requested) + " hits but only " +
                         std::to_string(available) + " are available"),
      requested_(requested),
      available_(available) {}

std::int64_t floor_power(std::int64_t n, double c) {
  return floor_pow(static_cast<double>(n), c).floor;
}

SparseSequence floor_power_sequence(double c, std::int64_t count) {
  if (!std::isfinite(c) || c < 1.0 || c >= 2.0) {
    throw DomainError("floor_power_sequence: exponent c must lie in [1, 2)");
  }
  if (count < 1) throw DomainError("floor_power_sequence: count must be >= 1");
  SparseSequence s;
  s.kind = Deterministic{c};
  s.terms.resize(static_cast<std::size_t>(count));
  for (std::int64_t n = 1; n <= count; ++n) {
    s.terms[static_cast<std::size_t>(n - 1)] = c == 1.0 ? n : floor_power(n, c);
  }
  return s;
}

IndicatorSeries bernoulli_indicators(double alpha, std::int64_t n_max, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("bernoulli_indicators: alpha must lie in (0, 1)");
  }
  if (n_max < 1) throw DomainError("bernoulli_indicators: n_max must be >= 1");
  IndicatorSeries ind;
  ind.alpha = alpha;
  ind.seed = seed;
  ind.values.resize(static_cast<std::size_t>(n_max));
  ind.partial_sums.resize(static_cast<std::size_t>(n_max));
  std::int64_t running = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double p = std::pow(static_cast<double>(n), -alpha);
    const double u = counter_uniform(seed, streams::bernoulli, static_cast<std::uint64_t>(n));
    const std::uint8_t x = u < p ? 1 : 0;
    running += x;
    ind.values[static_cast<std::size_t>(n - 1)] = x;
    ind.partial_sums[static_cast<std::size_t>(n - 1)] = running;
  }
  return ind;
}

SparseSequence hitting_times(const IndicatorSeries& ind, std::int64_t count) {
  if (count < 1) throw DomainError("hitting_times: count must be >= 1");
  const std::int64_t available = ind.partial_sums.empty() ? 0 : ind.partial_sums.back();
  if (available < count) throw ExhaustedError(count, available);
  SparseSequence s;
  s.kind = Random{ind.alpha, ind.seed};
  s.terms.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 1; k <= ind.n_max() && static_cast<std::int64_t>(s.terms.size()) < count; ++k) {
    if (ind.at(k)) s.terms.push_back(k);
  }
  return s;
}

double chernoff_tail(double lambda, double variance) {
  return 10.0 * std::max(std::exp(-lambda * lambda / (10.0 * variance)), std::exp(-lambda / 10.0));
}

double concentration_envelope(std::int64_t N, double alpha) {
  const double n = static_cast<double>(N);
  return 10.0 * std::sqrt(std::log(n)) * std::pow(n, (1.0 - alpha) / 2.0);
}

LacunaryGrid lacunary_grid(int R, std::int64_t n_max, std::int64_t tail_start) {
  if (R < 1) throw DomainError("lacunary_grid: R must be >= 1");
  LacunaryGrid g;
  g.R = R;
  g.tail_start = tail_start;
  // The grid starts at the first time >= 2, i.e. k = R.
  for (std::int64_t k = R;; ++k) {
    const double t = std::floor(std::exp2(static_cast<double>(k) / R));
    if (t > static_cast<double>(n_max)) break;
    const auto v = static_cast<std::int64_t>(t);
    if (g.times.empty() || g.times.back() != v) g.times.push_back(v);
  }
  double lam = 0.0;
  double tail = 0.0;
  for (std::size_t i = 1; i < g.times.size(); ++i) {
    const double r = static_cast<double>(g.times[i]) / static_cast<double>(g.times[i - 1]);
    lam = i == 1 ? r : std::min(lam, r);
    if (g.times[i - 1] >= tail_start) tail = tail == 0.0 ? r : std::min(tail, r);
  }
  g.lambda = lam;
  g.tail_lambda = tail;
  return g;
}

std::string to_tsv(const SparseSequence& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.terms.size(); ++i) os << (i + 1) << '\t' << s.terms[i] << '\n';
  return os.str();
}

SparseSequence from_tsv(const std::string& text) {
  SparseSequence s;
  std::istringstream is(text);
  std::int64_t n = 0;
  std::int64_t a = 0;
  std::int64_t expect = 1;
  while (is >> n >> a) {
    if (n != expect) throw ConfigError("from_tsv: indices must run 1, 2, 3, ...");
    if (!s.terms.empty() && a <= s.terms.back()) {
      throw ConfigError("from_tsv: terms must be strictly increasing");
    }
    s.terms.push_back(a);
    ++expect;
  }
  return s;
}

std::string to_json(const SparseSequence& s) { return nlohmann::json(s.terms).dump(); }

}  // namespace sparse_ergodic::seq
