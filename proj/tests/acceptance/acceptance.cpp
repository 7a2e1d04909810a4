// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failing criteria (capped at 1).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "../oracles.hpp"
#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/experiments.hpp"
#include "sparse_ergodic/oscfun.hpp"

namespace se = sparse_ergodic;
namespace ex = sparse_ergodic::experiments;
using nlohmann::json;

namespace {

std::string out_dir;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ex::Report run(const json& j) {
  auto cfg = ex::config_from_json(j);
  if (out_dir.empty()) return ex::compute(cfg);
  cfg.out = out_dir;
  return ex::run_experiment(cfg).report;
}

std::vector<std::int64_t> dyadic(int lo, int hi, int step = 1) {
  std::vector<std::int64_t> v;
  for (int e = lo; e <= hi; e += step) v.push_back(std::int64_t{1} << e);
  return v;
}

void check_report_checks(Outcome& o, const ex::Report& r) {
  for (const auto& c : r.checks) o.require(c.pass, r.experiment + "." + c.name + "=" + num(c.value) + " " + c.relation + " " + num(c.limit));
}

void slope_at_most(Outcome& o, const ex::Report& r, const std::string& fit, double limit, bool residual) {
  const auto& f = r.fit(fit);
  o.require(f.slope <= limit, fit + " slope=" + num(f.slope) + " <= " + num(limit));
  if (residual) o.require(f.residual_rms <= 0.2, fit + " residual=" + num(f.residual_rms) + " <= 0.2");
}

// 1: DP and direct formulas against exhaustive enumeration
void oracle_equivalence(Outcome& o) {
  std::mt19937_64 g(20240601);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_real_distribution<double> u(-1, 1);
  std::int64_t mismatches = 0, comparisons = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> a(static_cast<std::size_t>(len(g)));
    const bool lattice = t % 2 == 0;  // half the corpus has ties
    for (auto& x : a) x = lattice ? 0.5 * std::round(4 * u(g)) : u(g);
    for (double eps : {0.1, 0.5, 1.0}) {
      ++comparisons;
      mismatches += se::oscfun::jump_count(a, eps) != oracle::jump_count(a, eps);
    }
    for (double r : {1.0, 2.0, 3.0, se::oscfun::kInfinity}) {
      ++comparisons;
      const double want = oracle::variation(a, r);
      mismatches += std::abs(se::oscfun::variation(a, r) - want) > 1e-12 * std::max(1.0, want);
    }
    if (a.size() >= 2) {
      std::vector<std::size_t> bps{0};
      for (std::size_t i = 1; i < a.size(); ++i)
        if (g() % 3 == 0) bps.push_back(i);
      if (bps.size() < 2) bps.push_back(a.size() - 1);
      ++comparisons;
      const double want = oracle::oscillation(a, bps);
      mismatches += std::abs(se::oscfun::oscillation(a, bps) - want) > 1e-12 * std::max(1.0, want);
    }
  }
  o.require(mismatches == 0, "mismatches=" + std::to_string(mismatches) + " of " + std::to_string(comparisons));
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--out") out_dir = argv[i + 1];
    if (std::string(argv[i]) == "--threads") se::set_worker_threads(static_cast<unsigned>(std::stoul(argv[i + 1])));
  }

  const std::vector<Criterion> all{
      {1, "oscillation functionals equal exhaustive enumeration", 60, oracle_equivalence},
      {2, "inequality suite has no violations", 120,
       [](Outcome& o) { check_report_checks(o, run({{"experiment", "axioms"}, {"trials", 10000}, {"seed", 1}})); }},
      {3, "sawtooth identity for n <= 10^6 at c=1.1", 60,
       [](Outcome& o) { check_report_checks(o, run({{"experiment", "sawtooth"}, {"c", 1.1}, {"trials", 1000000}})); }},
      {4, "counting function: FFT equals pairs, normalized max stable", 300,
       [](Outcome& o) {
         check_report_checks(o, run({{"experiment", "counting-function"}, {"c", 1.1}, {"N", dyadic(12, 20, 2)}}));
       }},
      {5, "correlation gap decays like N^-1, small range O(1/N)", 600,
       [](Outcome& o) {
         const auto r = run({{"experiment", "correlation-gap"}, {"c", 1.1}, {"N", dyadic(12, 22)}});
         slope_at_most(o, r, "gap_main", -1.0, true);
         check_report_checks(o, r);
       }},
      {6, "Fourier piece sup bounds", 600,
       [](Outcome& o) {
         const double c = 1.1, d = 0.01;
         const auto r = run({{"experiment", "fourier-pieces"}, {"c", c}, {"delta", d}, {"oversample", 8}, {"N", dyadic(12, 18)}});
         slope_at_most(o, r, "f1_sup", 1 - 1 / (2 * c) + 0.05, false);
         slope_at_most(o, r, "f2_sup", 2 / c - 1 - d + 0.05, false);
       }},
      {7, "min-sum ratio bounded", 180,
       [](Outcome& o) {
         check_report_checks(o, run({{"experiment", "min-sum"}, {"c", 1.1}, {"delta", 0.01}, {"u", {0.0, 0.5}}, {"N", dyadic(10, 20)}}));
       }},
      {8, "random model: concentration, E-hat, E*E, cross terms", 900,
       [](Outcome& o) {
         const double alpha = 0.3;
         const auto r = run({{"experiment", "random-model"}, {"alpha", alpha}, {"seed", 1}, {"seeds", 100}, {"N", dyadic(10, 16)}});
         const auto& env = r.check("envelope_fraction");
         o.require(env.pass, "(a) envelope_fraction=" + num(env.value) + " >= 0.99");
         slope_at_most(o, r, "ehat_over_sqrtlog", (alpha - 1) / 2 + 0.05, false);
         slope_at_most(o, r, "ee_off_zero", -1.0, false);
         slope_at_most(o, r, "cross", alpha - 2 + 0.05, false);
         const auto& cs = r.check("cross_constant_spread");
         o.require(cs.pass, "cross_constant_spread=" + num(cs.value) + " < 4");
         o.detail << "; cross_constant slope=" << num(r.fit("cross_constant").slope);
       }},
      {9, "CZ corpus invariants and weak type stability in K", 900,
       [](Outcome& o) {
         check_report_checks(o, run({{"experiment", "cz-corpus"}, {"trials", 1000}, {"alpha", 0.3}, {"level", 0.125}, {"seed", 1}}));
         check_report_checks(o, run({{"experiment", "weak-type"}, {"c", 1.1}, {"epsilon", 1.0}, {"K", {1, 4, 16, 64}}, {"window_log2", 18}}));
       }},
      {10, "rotation averages converge, census bounded in H", 600,
       [](Outcome& o) {
         const auto e = run({{"experiment", "ergodic"}, {"c", 1.1}, {"modulus", 10007}, {"trials", 1000000}});
         const auto& f = e.check("fraction_within_0.02");
         o.require(f.pass, "fraction_within_0.02=" + num(f.value) + " >= 0.99");
         const auto c = run({{"experiment", "census"}, {"c", 1.1}, {"tau", 0.1}, {"H", dyadic(14, 20)}, {"seed", 1}});
         check_report_checks(o, c);
       }},
      {11, "van der Corput ratios <= 10", 600,
       [](Outcome& o) { check_report_checks(o, run({{"experiment", "vdc"}, {"c", 1.1}, {"trials", 1000}, {"seed", 1}})); }},
  };

  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, "runtime=" + num(secs) + "s < " + num(c.budget_s) + "s");
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " | " << o.detail.str()
              << std::endl;
  }
  std::cout << (all.size() - static_cast<std::size_t>(failed)) << "/" << all.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
