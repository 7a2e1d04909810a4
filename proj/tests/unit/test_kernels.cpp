#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/fit.hpp"
#include "sparse_ergodic/kernels.hpp"

using namespace sparse_ergodic;
using namespace sparse_ergodic::kernels;

TEST_CASE("half birkhoff kernel") {
  const auto k = birkhoff_kernel(8, CutoffFunction::constant());
  CHECK(k.offset == 5);
  CHECK(k.values == std::vector<double>(4, 1.0 / 8));
  const auto big = birkhoff_kernel(1 << 12, CutoffFunction::constant());
  CHECK(big.sum() == doctest::Approx(0.5));
  const auto auto0 = correlate(big, big).at(0);
  CHECK(auto0 == doctest::Approx(1.0 / (2.0 * (1 << 12))));
}

TEST_CASE("power average kernel support and autocorrelation at zero") {
  const std::int64_t N = 1 << 12;
  const double c = 1.1;
  const auto A = power_average_kernel(N, c);
  const auto terms = oracle::floor_power_terms(N / 2, N, c);
  CHECK(A.support_size() == terms.size());
  for (auto t : terms) CHECK(A.at(t) > 0.0);
  const double expect = std::pow(N, 1 / c) - std::pow(N / 2.0, 1 / c);
  CHECK(std::abs(static_cast<double>(terms.size()) - expect) < 3.0);
  CHECK(correlate(A, A).at(0) == doctest::Approx(static_cast<double>(terms.size()) / std::pow(N, 2 / c)));
  // near c = 1 every integer in (N/2, N] is hit
  CHECK(power_average_kernel(256, 1.0 + 1e-9).support_size() == 128);
  CHECK_THROWS_AS(power_average_kernel(256, 1.0), DomainError);
}

TEST_CASE("random kernels") {
  const auto ind = seq::bernoulli_indicators(1e-9, 1 << 12, 1);
  const auto A = random_average_kernel(ind, 1 << 12);
  const auto B = random_main_kernel(1e-9, 1 << 12);
  CHECK(subtract(A, B).l1() < 1e-3);
  const auto ind2 = seq::bernoulli_indicators(0.3, 1 << 14, 2);
  const auto A2 = random_average_kernel(ind2, 1 << 14);
  CHECK(A2.sum() == doctest::Approx(static_cast<double>(ind2.mass((1 << 13) + 1, 1 << 14)) /
                                    expected_mass(0.3, 1 << 14)));
  CHECK(random_average_kernel(ind2, 1 << 14, RandomNormalization::empirical).sum() == doctest::Approx(1.0));
}

TEST_CASE("random error kernel: l1 size is order one, Fourier sup decays") {
  std::vector<double> Ns, med, l1;
  for (int e = 10; e <= 16; ++e) {
    const std::int64_t N = std::int64_t{1} << e;
    std::vector<double> d;
    for (int s = 0; s < 30; ++s) {
      const auto ind = seq::bernoulli_indicators(0.3, N, 50 + s);
      const auto E = subtract(random_average_kernel(ind, N), random_main_kernel(0.3, N));
      d.push_back(fourier_sup(E).value);
      l1.push_back(E.l1());
    }
    std::sort(d.begin(), d.end());
    Ns.push_back(static_cast<double>(N));
    med.push_back(d[d.size() / 2] / std::sqrt(std::log(static_cast<double>(N))));
  }
  CHECK(fit::fit_slope(Ns, med).slope < -0.25);
  for (double v : l1) CHECK(v > 0.3);
}

TEST_CASE("convolution algebra") {
  Kernel k;
  k.offset = -3;
  k.values = {0.5, -1.0, 2.0, 0.25};
  const auto d = convolve(Kernel::delta(), k);
  CHECK(d.offset == k.offset);
  for (std::int64_t x = -3; x <= 0; ++x) CHECK(d.at(x) == doctest::Approx(k.at(x)));
  CHECK(correlate(k, k).at(0) == doctest::Approx(k.l2sq()));
  const auto kk = correlate(k, k);
  for (std::int64_t x = 1; x < 4; ++x) CHECK(kk.at(x) == doctest::Approx(kk.at(-x)));
}

TEST_CASE("FFT convolution matches the direct oracle") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {1u, 17u, 600u, 4096u}) {
    Kernel a, b;
    a.offset = 7;
    b.offset = -11;
    a.values.resize(n);
    b.values.resize(n / 2 + 3);
    for (auto& x : a.values) x = u(g);
    for (auto& x : b.values) x = u(g);
    const auto fast = convolve(a, b);
    const auto ref = oracle::convolve(a.values, b.values);
    CHECK(fast.offset == a.offset + b.offset);
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      scale = std::max(scale, std::abs(ref[i]));
      err = std::max(err, std::abs(ref[i] - fast.values[i]));
    }
    CHECK(err <= 1e-12 * std::max(1.0, scale) * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("fourier_sup") {
  const auto s = fourier_sup(Kernel::delta(), 8);
  CHECK(s.value == doctest::Approx(1.0));
  Kernel u;
  u.offset = 1;
  u.values.assign(100, 0.01);
  CHECK(fourier_sup(u, 8).value == doctest::Approx(1.0));
  CHECK(fourier_sup(u, 8).grid_spacing > 0.0);
}

TEST_CASE("sawtooth identity") {
  for (std::int64_t n = 1; n <= 300; ++n) CHECK(sawtooth_identity_check(n, 1.0).status == IdentityStatus::holds);
  for (std::int64_t n = 1; n <= 20000; ++n) {
    const auto r = sawtooth_identity_check(n, 1.1);
    CHECK(r.status == IdentityStatus::holds);
  }
  // n = k^c rounded: n^(1/c) lands next to an integer, forcing escalation
  bool escalated = false;
  for (std::int64_t k = 2; k < 4000 && !escalated; ++k) {
    const auto n = oracle::floor_power(k, 1.5);
    const auto r = sawtooth_identity_check(n, 1.5);
    CHECK(r.status == IdentityStatus::holds);
    escalated = r.precision != Precision::binary64;
  }
  CHECK(escalated);
}

TEST_CASE("fourier pieces reconstruct the indicator") {
  const std::int64_t N = 1 << 12;
  const double c = 1.1;
  const auto p = fourier_pieces(N, c, default_H(N, c, 0.01));
  CHECK(p.reconstruction_error < 1e-8);
  double worst = 0.0;
  for (std::int64_t m = N / 2 + 1; m <= N; ++m) {
    const double sum = p.fs.at(m) + p.f1.at(m) + p.f2.at(m) + p.E.at(m);
    worst = std::max(worst, std::abs(sum - p.indicator.at(m)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("pointwise error piece scales like N^(1/c-2)") {
  const double c = 1.1;
  std::vector<double> C;
  for (int e = 12; e <= 16; e += 2) {
    const std::int64_t N = std::int64_t{1} << e;
    const auto p = fourier_pieces(N, c, default_H(N, c));
    C.push_back(p.E.linf() / std::pow(static_cast<double>(N), 1 / c - 2));
  }
  CHECK(fit::spread(C) < 4.0);
}

TEST_CASE("correlation gap small range is O(1/N)") {
  std::vector<double> v;
  for (int e = 12; e <= 16; e += 2) {
    const std::int64_t N = std::int64_t{1} << e;
    const auto g = correlation_gap(N, 1.1);
    CHECK(g.exact_counts);
    v.push_back(g.gap_small * static_cast<double>(N));
    CHECK(g.at_zero == doctest::Approx(correlate(power_average_kernel(N, 1.1), power_average_kernel(N, 1.1)).at(0)));
  }
  CHECK(fit::spread(v) < 4.0);
}

TEST_CASE("correlation decomposition") {
  const auto d = correlation_decompose(1 << 12, 1.1);
  CHECK(d.rho.at(0) == 0.0);
  for (std::int64_t x = 1; x < 200; ++x) CHECK(d.rho.at(x) == doctest::Approx(d.rho.at(-x)));
  std::vector<double> C;
  for (int e = 11; e <= 14; ++e) {
    const std::int64_t N = std::int64_t{1} << e;
    std::vector<double> per;
    for (int s = 0; s < 10; ++s) {
      const auto r = correlation_decompose(seq::bernoulli_indicators(0.3, N, 300 + s), N);
      per.push_back(r.rho_sup * static_cast<double>(N));
    }
    std::sort(per.begin(), per.end());
    C.push_back(per[per.size() / 2]);
  }
  CHECK(fit::spread(C) < 4.0);
}

TEST_CASE("transfer bound with zero error equals the main side") {
  const std::vector<std::int64_t> scales{64, 128, 256, 512};
  auto fam = deterministic_family(1.1, scales);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    fam.A[i] = fam.B[i];
    fam.E[i] = Kernel{};
    fam.E[i].offset = fam.B[i].offset;
    fam.E[i].values.assign(fam.B[i].values.size(), 0.0);
  }
  std::vector<double> f(2048, 0.0);
  f[0] = 1.0;
  const auto r = transfer_bound_check(fam, f, oscfun::OscillationFunctional::var(2.0), 1);
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(r.rhs_main));
  CHECK(r.rhs_error == 0.0);
}

TEST_CASE("transfer bound on random input") {
  const std::vector<std::int64_t> scales{256, 512, 1024, 2048, 4096};
  const auto fam = deterministic_family(1.1, scales);
  std::mt19937_64 g(4);
  std::vector<double> f(8192);
  for (auto& x : f) x = static_cast<double>(g() % 2);
  for (int p : {1, 2}) {
    CHECK(transfer_bound_check(fam, f, oscfun::OscillationFunctional::var(2.0), p).holds);
    CHECK(transfer_bound_check(fam, f, oscfun::OscillationFunctional::jump(0.05), p).holds);
  }
}

TEST_CASE("kernel serialization") {
  const auto k = power_average_kernel(1024, 1.2);
  CHECK(kernel_from_json(to_json(k)).values == k.values);
  const auto b = kernel_from_binary(to_binary(k));
  CHECK(b.offset == k.offset);
  CHECK(b.values == k.values);
}

TEST_CASE("correlation gap matches a direct double sum") {
  const std::int64_t N = 1 << 10;
  const double c = 1.1;
  const double scale = std::pow(static_cast<double>(N), 1 / c);
  const auto terms = oracle::floor_power_terms(N / 2, N, c);
  std::vector<double> a(static_cast<std::size_t>(N + 1), 0.0), b(static_cast<std::size_t>(N + 1), 0.0);
  for (auto t : terms) a[t] = 1.0 / scale;
  for (std::int64_t n = N / 2 + 1; n <= N; ++n) b[n] = std::pow(static_cast<double>(n), 1 / c - 1) / (c * scale);
  double main = 0.0, small = 0.0;
  for (std::int64_t x = 1; x <= N; ++x) {
    double aa = 0.0, bb = 0.0;
    for (std::int64_t n = 0; n + x <= N; ++n) {
      aa += a[n] * a[n + x];
      bb += b[n] * b[n + x];
    }
    if (x >= scale) main = std::max(main, std::abs(aa - bb));
    if (x <= scale) small = std::max(small, aa);
  }
  const auto g = correlation_gap(N, c);
  CHECK(g.gap_main == doctest::Approx(main).epsilon(1e-9));
  CHECK(g.gap_small == doctest::Approx(small).epsilon(1e-9));
}
