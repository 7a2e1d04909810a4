#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/oscfun.hpp"

using namespace sparse_ergodic;
using namespace sparse_ergodic::oscfun;

TEST_CASE("jump_count basics") {
  const std::vector<double> flat(9, 2.5);
  CHECK(jump_count(flat, 0.1) == 0);
  const std::vector<double> zz{0, 1, 0, 1};
  CHECK(jump_count(zz, 0.5) == 3);
  CHECK(jump_count(zz, 1.0) == 0);  // strict
  CHECK(jump_count(zz, diameter(zz)) == 0);
  CHECK_THROWS_AS(jump_count(zz, 0.0), DomainError);
}

TEST_CASE("greedy jump count is a lower bound") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(40);
    for (auto& x : a) x = nd(g);
    CHECK(jump_count_greedy(a, 0.7) <= jump_count(a, 0.7));
  }
}

TEST_CASE("variation basics") {
  const std::vector<double> mono{0.0, 0.5, 1.5, 4.0};
  for (double r : {1.0, 2.0, 3.5}) CHECK(variation(mono, r) == doctest::Approx(4.0));
  const std::vector<double> v{0, 1, 0};
  CHECK(variation(v, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(variation(std::vector<double>{3.0}, 2.0) == 0.0);
  CHECK(variation(v, kInfinity) == 1.0);
  CHECK_THROWS_AS(variation(v, 0.5), DomainError);
}

TEST_CASE("oscillation basics") {
  const std::vector<double> a{0, 1, 0, 2};
  const std::vector<std::size_t> bps{0, 2, 3};
  CHECK(oscillation(a, bps) == doctest::Approx(std::sqrt(5.0)));
  const std::vector<double> mono{1, 2, 4, 7};
  const std::vector<std::size_t> one{1, 3};
  CHECK(oscillation(mono, one) == doctest::Approx(5.0));
  CHECK(oscillation(std::vector<double>(5, 1.0), std::vector<std::size_t>{0, 4}) == 0.0);
  CHECK_THROWS_AS(oscillation(a, std::vector<std::size_t>{2, 1}), DomainError);
  CHECK_THROWS_AS(oscillation(a, std::vector<std::size_t>{0, 9}), DomainError);
}

TEST_CASE("functionals match exhaustive enumeration") {
  std::mt19937_64 g(17);
  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_int_distribution<int> lattice(-3, 3);
  for (int t = 0; t < 400; ++t) {
    std::vector<double> a(static_cast<std::size_t>(len(g)));
    for (auto& x : a) x = 0.5 * lattice(g);  // ties on purpose
    for (double eps : {0.25, 0.5, 1.0, 2.0}) CHECK(jump_count(a, eps) == oracle::jump_count(a, eps));
    for (double r : {1.0, 2.0, 3.0, kInfinity}) CHECK(variation(a, r) == doctest::Approx(oracle::variation(a, r)));
    if (a.size() >= 2) {
      std::vector<std::size_t> bps{0};
      for (std::size_t i = 1; i < a.size(); ++i)
        if (g() % 2) bps.push_back(i);
      if (bps.size() < 2) bps.push_back(a.size() - 1);
      CHECK(oscillation(a, bps) == doctest::Approx(oracle::oscillation(a, bps)));
    }
  }
}

TEST_CASE("complex input uses the modulus") {
  const std::vector<Complex> a{{0, 0}, {0, 1}, {0, 0}};
  CHECK(jump_count(a, 0.5) == 2);
  CHECK(variation(a, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diameter(a) == 1.0);
}

TEST_CASE("DP length guard") {
  std::vector<double> a(kMaxDpLength + 1, 0.0);
  CHECK_THROWS_AS(jump_count(a, 1.0), DomainError);
  CHECK(jump_count(a, 1.0, true) == 0);
}

TEST_CASE("evaluate and validate") {
  const std::vector<double> zz{0, 1, 0, 1};
  CHECK(evaluate(OscillationFunctional::jump(0.5), zz) == doctest::Approx(0.5 * std::sqrt(3.0)));
  CHECK(evaluate(OscillationFunctional::diam(), zz) == 1.0);
  CHECK(kind_from_string("variation") == Kind::variation);
  CHECK_THROWS_AS(kind_from_string("nope"), ConfigError);
  CHECK_THROWS_AS(OscillationFunctional::jump(-1.0).validate(), DomainError);
}

TEST_CASE("axiom suite reports no violations") {
  const auto rep = axiom_suite(Family::all, 500, 3);
  CHECK(!rep.entries.empty());
  CHECK(rep.total_violations() == 0);
  for (const auto& e : rep.entries) CHECK(e.trials == 500);
}

TEST_CASE("series io round trip") {
  const std::vector<double> a{1.5, -2.0, 3.25e-8};
  CHECK(series_from_json(series_to_json(a)) == a);
  CHECK(series_from_binary(series_to_binary(a)) == a);
  CHECK_THROWS(series_from_binary("abc"));
  CHECK_THROWS(series_from_json("{\"a\":1}"));
}
