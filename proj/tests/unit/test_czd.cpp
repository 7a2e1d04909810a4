#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/czd.hpp"
#include "sparse_ergodic/kernels.hpp"

using namespace sparse_ergodic;
using namespace sparse_ergodic::czd;

namespace {

Signal random_signal(std::mt19937_64& g, std::size_t len) {
  std::uniform_real_distribution<double> u(0, 1);
  Signal f;
  f.offset = static_cast<std::int64_t>(g() % 200) - 100;
  f.values.resize(len);
  for (auto& v : f.values) {
    const double p = u(g);
    v = p < 0.6 ? 0.0 : (p < 0.95 ? 2 * u(g) - 1 : 256.0 * u(g));
  }
  return f;
}

}  // namespace

TEST_CASE("dyadic intervals") {
  const DyadicInterval q{3, -2};
  CHECK(q.start() == -16);
  CHECK(q.end() == -8);
  CHECK(q.contains(-9));
  CHECK(!q.contains(-8));
  CHECK(q.parent() == DyadicInterval{4, -1});
  CHECK(DyadicInterval{0, -1}.parent() == DyadicInterval{1, -1});
}

TEST_CASE("maximal function of a point mass") {
  const auto f = Signal::point_masses({{0, 1.0}});
  const auto M = hl_maximal(f, -20, 21);
  for (std::int64_t x = -20; x <= 20; ++x) {
    CHECK(M[static_cast<std::size_t>(x + 20)] == doctest::Approx(1.0 / (2.0 * std::abs(x) + 1.0)));
  }
  // weak type of delta_0: lambda |{M > lambda}| <= 2
  const auto wide = hl_maximal(f, -5000, 5001);
  for (double lam = 1e-3; lam < 1.0; lam *= 1.1) {
    const auto cnt = std::count_if(wide.begin(), wide.end(), [&](double v) { return v > lam; });
    CHECK(lam * static_cast<double>(cnt) <= 2.0);
  }
}

TEST_CASE("maximal function matches the brute force radius scan") {
  std::mt19937_64 g(2);
  for (int t = 0; t < 30; ++t) {
    const auto f = random_signal(g, 1 + g() % 24);
    std::map<std::int64_t, double> m;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (f.values[i] != 0.0) m[f.offset + static_cast<std::int64_t>(i)] = f.values[i];
    const std::int64_t lo = f.offset - 10, hi = f.end() + 10;
    const auto M = hl_maximal(f, lo, hi);
    for (std::int64_t x = lo; x < hi; ++x) {
      CHECK(M[static_cast<std::size_t>(x - lo)] == doctest::Approx(oracle::hl_maximal_at(m, x, hi - lo + 40)));
    }
  }
}

TEST_CASE("constant signal has maximal function equal to the constant inside") {
  Signal f;
  f.offset = 0;
  f.values.assign(101, 3.0);
  const auto M = hl_maximal(f, 50, 51);
  CHECK(M[0] == doctest::Approx(3.0));
}

TEST_CASE("stopping intervals") {
  CHECK(cz_stopping(Signal{}).intervals.empty());
  const double H = 64.0;
  const auto s = cz_stopping(Signal::point_masses({{0, H}}), 1.0);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    const auto& q = s.intervals[i];
    total += q.length();
    if (i > 0) CHECK(s.intervals[i - 1].end() <= q.start());
    // maximality: the parent leaves the set {M >= level}
    const auto par = q.parent();
    const auto M = hl_maximal(Signal::point_masses({{0, H}}), par.start(), par.end());
    CHECK(*std::min_element(M.begin(), M.end()) < 1.0);
  }
  CHECK(total == s.covered);
  CHECK(std::abs(static_cast<double>(total) - H) <= 4.0);
  CHECK(s.max_ratio < 4.0);
}

TEST_CASE("cz_split with small input is all good") {
  Signal f;
  f.offset = 3;
  f.values = {0.01, -0.02, 0.0, 0.03};
  const auto d = cz_split(f, 4, 0.3);
  CHECK(d.atoms.empty());
  for (std::size_t i = 0; i < d.width; ++i) {
    CHECK(d.good[i] == doctest::Approx(d.f[i]));
    CHECK(d.heavy[i] == 0.0);
  }
}

TEST_CASE("cz_split invariants on random inputs") {
  std::mt19937_64 g(8);
  for (int t = 0; t < 150; ++t) {
    const auto f = random_signal(g, 8 + g() % 100);
    const int n = static_cast<int>(g() % 12);
    const auto d = cz_split(f, n, 0.3);
    CHECK(d.reconstruction_error <= 1e-12 * std::max(1.0, f.linf()));
    for (const auto& a : d.atoms) {
      CHECK(std::abs(a.sum) <= 1e-12 * std::max(1.0, f.l1()));
      CHECK(a.l1 <= 8.0 * d.level * static_cast<double>(a.Q.length()));
    }
    CHECK(d.good_sup <= 4.0 * d.level);
    CHECK(static_cast<double>(d.E_size) <= d.E_bound);
    for (int k = 0; k < 3; ++k) {
      const int m = static_cast<int>(g() % 6);
      const std::int64_t len = (std::int64_t{1} << m) * (1 + static_cast<std::int64_t>(g() % 8));
      const std::int64_t lo = d.offset + static_cast<std::int64_t>(g() % std::max<std::size_t>(1, d.width));
      CHECK(set_estimate_ratio(d, m, lo, len) <= set_estimate_constant(d.level));
    }
  }
  CHECK_THROWS_AS(set_estimate_ratio(cz_split(Signal::point_masses({{0, 9.0}}), 3, 0.3), 4, 0, 8), DomainError);
}

TEST_CASE("sumset X") {
  const auto f = Signal::point_masses({{0, 1e6}, {10, 1.0}});
  const std::vector<std::int64_t> supp{1, 2, 4};
  const auto d = cz_split(f, 4, 0.3, 0.125, supp);
  CHECK(d.large_count == 1);
  CHECK(d.X == std::vector<std::int64_t>{1, 2, 4});
}

TEST_CASE("weak type ratio") {
  std::vector<kernels::Kernel> fam;
  for (int e = 4; e <= 10; ++e) fam.push_back(kernels::birkhoff_kernel(std::int64_t{1} << e, kernels::CutoffFunction::constant()));
  const auto jump = oscfun::OscillationFunctional::jump(1e-4);
  const auto w = weak_type_ratio(fam, jump, Signal::point_masses({{0, 1.0}}));
  CHECK(std::isfinite(w.ratio));
  CHECK(w.ratio > 0.0);
  CHECK(w.ratio < 10.0);
  // invariant under scaling f and epsilon together
  const auto w2 = weak_type_ratio(fam, oscfun::OscillationFunctional::jump(1e-2), Signal::point_masses({{0, 100.0}}));
  CHECK(w2.ratio == doctest::Approx(w.ratio));
  CHECK_THROWS_AS(weak_type_ratio(fam, jump, Signal::point_masses({{0, 1.0}}), std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(weak_type_ratio(fam, jump, Signal::point_masses({{0, 0.0}})), DomainError);
  // explicit grid never beats the exact supremum
  const auto grid = lambda_grid(1e-6, 1.0);
  CHECK(weak_type_ratio(fam, jump, Signal::point_masses({{0, 1.0}}), grid).ratio <= w.ratio + 1e-12);
}

TEST_CASE("rho against bad parts") {
  const auto f = Signal::point_masses({{0, 50.0}, {3, -20.0}, {40, 9.0}});
  const auto d = cz_split(f, 8, 0.3);
  const auto rho = kernels::correlation_decompose(1 << 10, 1.1).rho;
  const auto r = rho_bad_decay(d, rho);
  CHECK(r.s.size() == r.sup.size());
  for (double v : r.sup) CHECK(v >= 0.0);
}

TEST_CASE("interval csv header") {
  const auto s = cz_stopping(Signal::point_masses({{0, 8.0}}), 1.0);
  CHECK(intervals_csv(s).rfind("scale,start,length,mass\n", 0) == 0);
}
