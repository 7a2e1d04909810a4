#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/seq.hpp"

using namespace sparse_ergodic;

TEST_CASE("floor_power_sequence small cases") {
  CHECK(seq::floor_power_sequence(1.0, 5).terms == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  CHECK(seq::floor_power(4, 1.5) == 8);
  CHECK(seq::floor_power_sequence(1.1, 10).terms == std::vector<std::int64_t>{1, 2, 3, 4, 5, 7, 8, 9, 11, 12});
}

TEST_CASE("floor_power_sequence agrees with 100 digit floors") {
  for (double c : {1.05, 1.1, 1.37, 1.5, 1.99}) {
    const auto s = seq::floor_power_sequence(c, 3000);
    for (std::int64_t n = 1; n <= 3000; n += 7) CHECK(s.terms[n - 1] == oracle::floor_power(n, c));
  }
  // exact squares and cubes sit right on integer boundaries
  CHECK(seq::floor_power(9, 1.5) == 27);
  CHECK(seq::floor_power(10000, 1.5) == 1000000);
}

TEST_CASE("floor_power_sequence rejects c outside [1,2)") {
  CHECK_THROWS_AS(seq::floor_power_sequence(2.0, 3), DomainError);
  CHECK_THROWS_AS(seq::floor_power_sequence(0.9, 3), DomainError);
}

TEST_CASE("bernoulli indicators are reproducible and local") {
  const auto a = seq::bernoulli_indicators(0.3, 5000, 7);
  const auto b = seq::bernoulli_indicators(0.3, 5000, 7);
  CHECK(a.values == b.values);
  // X_n does not depend on n_max
  const auto c = seq::bernoulli_indicators(0.3, 300, 7);
  for (std::int64_t n = 1; n <= 300; ++n) CHECK(c.at(n) == a.at(n));
  const auto d = seq::bernoulli_indicators(0.3, 5000, 8);
  CHECK(d.values != a.values);
}

TEST_CASE("alpha near zero gives mostly ones") {
  const auto ind = seq::bernoulli_indicators(1e-6, 4096, 3);
  CHECK(static_cast<double>(ind.mass(1, 4096)) / 4096.0 > 0.99);
}

namespace {
seq::IndicatorSeries series_of(std::vector<std::uint8_t> v) {
  seq::IndicatorSeries ind;
  ind.values = std::move(v);
  std::int64_t acc = 0;
  for (auto x : ind.values) ind.partial_sums.push_back(acc += x);
  return ind;
}
}  // namespace

TEST_CASE("hitting_times") {
  CHECK(seq::hitting_times(series_of({1, 1, 1}), 3).terms == std::vector<std::int64_t>{1, 2, 3});
  const auto ind = series_of({0, 1, 0, 1, 1});
  CHECK(seq::hitting_times(ind, 3).terms == std::vector<std::int64_t>{2, 4, 5});
  CHECK_THROWS_AS(seq::hitting_times(ind, 4), seq::ExhaustedError);
}

TEST_CASE("hitting times grow like n^(1/(1-alpha))") {
  const double alpha = 0.3;
  const auto ind = seq::bernoulli_indicators(alpha, 1 << 20, 11);
  const auto s = seq::hitting_times(ind, 20000);
  double lo = 1e300, hi = 0;
  for (std::int64_t n = 100; n <= 20000; n += 50) {
    const double r = static_cast<double>(s.terms[n - 1]) / std::pow(static_cast<double>(n), 1.0 / (1.0 - alpha));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.5);
  CHECK(hi < 2.0);
}

TEST_CASE("chernoff_tail") {
  CHECK(seq::chernoff_tail(0.0, 5.0) == doctest::Approx(10.0));
  double prev = 11.0;
  for (double l = 0.0; l < 200.0; l += 0.5) {
    const double v = seq::chernoff_tail(l, 7.0);
    CHECK(v <= prev);
    prev = v;
  }
  // gaussian regime where lambda^2/(10V) = ln 10 and lambda/10 >= ln 10
  const double lambda = 10.0 * std::log(10.0) * 2.0;
  const double V = lambda * lambda / (10.0 * std::log(10.0));
  CHECK(seq::chernoff_tail(lambda, V) == doctest::Approx(1.0));
}

TEST_CASE("concentration envelope holds for most seeds") {
  const double alpha = 0.3;
  const std::int64_t N = 1 << 20;
  int inside = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const auto ind = seq::bernoulli_indicators(alpha, N, 1000 + s);
    const double dev = std::abs(static_cast<double>(ind.mass(N / 2 + 1, N)) - ind.expected_mass(N / 2 + 1, N));
    if (dev <= seq::concentration_envelope(N, alpha)) ++inside;
  }
  CHECK(inside >= 198);
}

TEST_CASE("lacunary_grid") {
  CHECK(seq::lacunary_grid(1, 64).times == std::vector<std::int64_t>{2, 4, 8, 16, 32, 64});
  CHECK(seq::lacunary_grid(2, 8).times == std::vector<std::int64_t>{2, 4, 5, 8});
  const auto g = seq::lacunary_grid(16, 1 << 24, 1 << 20);
  for (std::size_t i = 1; i < g.times.size(); ++i) {
    CHECK(g.times[i] > g.times[i - 1]);
    if (g.times[i - 1] >= (1 << 20)) {
      CHECK(static_cast<double>(g.times[i]) / g.times[i - 1] >= std::exp2(1.0 / 16) * (1 - 1e-6));
    }
  }
  CHECK(g.tail_lambda >= std::exp2(1.0 / 16) * (1 - 1e-6));
}

TEST_CASE("sequence text round trip") {
  const auto s = seq::floor_power_sequence(1.3, 50);
  CHECK(seq::from_tsv(seq::to_tsv(s)).terms == s.terms);
  CHECK(s.count_up_to(s.terms[9]) == 10);
}
