#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/ergosim.hpp"

using namespace sparse_ergodic;
using namespace sparse_ergodic::ergosim;

TEST_CASE("constant f gives constant averages") {
  const auto s = seq::floor_power_sequence(1.1, 500);
  const std::vector<double> f(97, 0.25);
  const std::vector<std::int64_t> times{1, 10, 100, 500};
  const auto field = ergodic_averages(CyclicRotation{97, 5}, f, s, times);
  for (double v : field.values) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("identity rotation leaves f unchanged") {
  const auto s = seq::floor_power_sequence(1.1, 64);
  const std::vector<double> f{0.0, 1.0};
  const std::vector<std::int64_t> times{1, 2, 64};
  const auto field = ergodic_averages(CyclicRotation{2, 0}, f, s, times);
  for (std::int64_t x = 0; x < 2; ++x)
    for (std::size_t j = 0; j < times.size(); ++j) CHECK(field.at(x, j) == doctest::Approx(f[x]));
}

TEST_CASE("averages match a direct loop") {
  const auto s = seq::floor_power_sequence(1.3, 300);
  std::mt19937_64 g(3);
  std::vector<double> f(61);
  for (auto& v : f) v = static_cast<double>(g() % 5);
  const std::vector<std::int64_t> times{1, 7, 50, 300};
  const auto field = ergodic_averages(CyclicRotation{61, 7}, f, s, times);
  for (std::int64_t x = 0; x < 61; ++x) {
    double acc = 0.0;
    std::size_t j = 0;
    for (std::int64_t n = 1; n <= 300; ++n) {
      acc += f[static_cast<std::size_t>((x + 7 * s.terms[n - 1]) % 61)];
      if (n == times[j]) CHECK(field.at(x, j++) == doctest::Approx(acc / n));
    }
  }
  // shift: both the incremental and the FFT path
  std::vector<double> big(5000);
  for (auto& v : big) v = static_cast<double>(g() % 2);
  const std::vector<std::int64_t> t2{2, 3, 200, 300};
  const auto sf = ergodic_averages(IntegerShift{100}, big, s, t2);
  for (std::int64_t x = 0; x < 100; x += 9) {
    double acc = 0.0;
    std::size_t j = 0;
    for (std::int64_t n = 1; n <= 300; ++n) {
      acc += big[static_cast<std::size_t>(x + s.terms[n - 1])];
      if (n == t2[j]) CHECK(sf.at(x, j++) == doctest::Approx(acc / n));
    }
  }
}

TEST_CASE("times must be increasing and covered") {
  const auto s = seq::floor_power_sequence(1.1, 10);
  const std::vector<double> f(5, 1.0);
  CHECK_THROWS_AS(ergodic_averages(CyclicRotation{5, 1}, f, s, std::vector<std::int64_t>{3, 2}), DomainError);
  CHECK_THROWS_AS(ergodic_averages(CyclicRotation{5, 1}, f, s, std::vector<std::int64_t>{11}), DomainError);
  CHECK_THROWS_AS(ergodic_averages(CyclicRotation{6, 1}, f, s, std::vector<std::int64_t>{2}), DomainError);
}

TEST_CASE("census of simple fields") {
  SeriesField flat;
  flat.times = {1, 2, 3, 4, 5};
  flat.states = 3;
  flat.values.assign(15, 0.7);
  CHECK(c_tau_census(flat, 0.1).K == 0);
  CHECK(c_tau_census_exact(flat, 0.1).K == 0);
  // oscillates by 2 tau at every step and every state
  SeriesField zig = flat;
  for (std::int64_t x = 0; x < 3; ++x)
    for (std::size_t j = 0; j < 5; ++j) zig.values[x * 5 + j] = (j % 2) * 0.2;
  CHECK(c_tau_census(zig, 0.1).K == 4);
  CHECK(c_tau_census_exact(zig, 0.1).K == 4);
}

TEST_CASE("exact census matches subset enumeration; greedy is a lower bound") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 60; ++t) {
    SeriesField field;
    const std::size_t T = 2 + g() % 9;
    for (std::size_t j = 0; j < T; ++j) field.times.push_back(static_cast<std::int64_t>(j + 1));
    field.states = 1 + static_cast<std::int64_t>(g() % 6);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(field.states), std::vector<double>(T));
    for (auto& r : rows)
      for (auto& v : r) v = 0.3 * u(g);
    for (const auto& r : rows) field.values.insert(field.values.end(), r.begin(), r.end());
    const auto exact = c_tau_census_exact(field, 0.1);
    CHECK(exact.K == oracle::census(rows, 0.1));
    CHECK(c_tau_census(field, 0.1).K <= exact.K);
  }
}

TEST_CASE("streaming census equals the stored field census") {
  const auto s = seq::floor_power_sequence(1.1, 3000);
  const auto f = random_indicator(1009, 4);
  const auto times = seq::lacunary_grid(8, 3000).times;
  const auto field = ergodic_averages(CyclicRotation{1009, 1}, f, s, times);
  CHECK(census_stream(CyclicRotation{1009, 1}, f, s, times, 0.1).K == c_tau_census(field, 0.1).K);
}

TEST_CASE("majorants") {
  const seq::SequenceKind det = seq::Deterministic{1.1};
  for (double n : {1.0, 10.0, 1000.0}) CHECK(growth_majorant(det, n) >= std::pow(n, 1.1));
  const auto n = inverse_majorant(det, 1e5);
  CHECK(growth_majorant(det, static_cast<double>(n)) <= 1e5);
  CHECK(growth_majorant(det, static_cast<double>(n + 1)) > 1e5);
  const auto t = census_times(det, 1 << 16, 16);
  CHECK(!t.empty());
  CHECK(growth_majorant(det, static_cast<double>(t.back())) <= (1 << 16) / 100.0);
}

TEST_CASE("transfer comparison") {
  const auto s = seq::floor_power_sequence(1.1, 4000);
  const std::vector<double> flat(101, 1.0);
  const auto zero = transfer_compare(CyclicRotation{101, 1}, flat, s, 0.1, 4096);
  CHECK(zero.lhs == 0);
  CHECK(zero.z_census == 0);
  CHECK(zero.ratio == 0.0);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_indicator(101, 100 + i);
    CHECK(transfer_compare(CyclicRotation{101, 1}, f, s, 0.1, 4096).ratio <= 10.0);
  }
  // tau near 1: no block of a [0,1]-valued field reaches the threshold
  const auto f = random_indicator(101, 7);
  const auto near1 = transfer_compare(CyclicRotation{101, 1}, f, s, 0.999, 4096, 1.0);
  CHECK(near1.lhs == 0);
}

TEST_CASE("rotation averages equidistribute") {
  const std::int64_t m = 10007, N = 200000;
  const auto s = seq::floor_power_sequence(1.1, N);
  std::vector<double> f(static_cast<std::size_t>(m));
  for (std::int64_t x = 0; x < m; ++x) f[x] = 2 * x < m ? 1.0 : 0.0;
  const std::vector<std::int64_t> times{N};
  const auto field = ergodic_averages(CyclicRotation{m, 1}, f, s, times);
  std::int64_t inside = 0;
  for (std::int64_t x = 0; x < m; ++x) inside += std::abs(field.at(x, 0) - 0.5) <= 0.02;
  CHECK(static_cast<double>(inside) / m >= 0.99);
}

TEST_CASE("lipschitz in N on lacunary grids") {
  const auto s = seq::floor_power_sequence(1.1, 20000);
  const auto f = random_indicator(1009, 3);
  auto times = seq::lacunary_grid(16, 20000).times;
  times.pop_back();
  CHECK(lipschitz_check(CyclicRotation{1009, 1}, f, s, times, 16) <= 10.0);
}

TEST_CASE("traces csv") {
  const auto s = seq::floor_power_sequence(1.1, 10);
  const std::vector<double> f(3, 1.0);
  const auto field = ergodic_averages(CyclicRotation{3, 1}, f, s, std::vector<std::int64_t>{5, 10});
  const auto csv = traces_csv(field, 2);
  CHECK(csv.rfind("state,N,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
