#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/experiments.hpp"
#include "sparse_ergodic/fit.hpp"
#include "sparse_ergodic/io.hpp"

using namespace sparse_ergodic;
using nlohmann::json;

TEST_CASE("fit_slope exact power law") {
  std::vector<double> N, v;
  for (int e = 10; e <= 20; ++e) {
    N.push_back(std::exp2(e));
    v.push_back(std::pow(std::exp2(e), -1.5));
  }
  const auto f = fit::fit_slope(N, v, -1.5);
  CHECK(f.slope == doctest::Approx(-1.5));
  CHECK(f.residual_rms < 1e-12);
  REQUIRE(f.verdict.has_value());
  CHECK(*f.verdict);
  CHECK(!*fit::fit_slope(N, v, -1.6).verdict);
  const std::vector<double> flat(N.size(), 3.0);
  CHECK(fit::fit_slope(N, flat).slope == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_slope recovers a noisy exponent") {
  int good = 0;
  for (int s = 0; s < 200; ++s) {
    std::mt19937_64 g(s);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> N, v;
    for (int e = 10; e < 18; ++e) {
      N.push_back(std::exp2(e));
      v.push_back(1.0 / std::exp2(e) * (1 + 0.1 * u(g)));
    }
    good += std::abs(fit::fit_slope(N, v).slope + 1.0) <= 0.05;
  }
  CHECK(good >= 195);
}

TEST_CASE("fit_slope errors and verdict rules") {
  const std::vector<double> N{2, 4, 8};
  CHECK_THROWS_WITH_AS(fit::fit_slope(N, std::vector<double>{1, 0, 2}), doctest::Contains("N=4"), DomainError);
  CHECK_THROWS_AS(fit::fit_slope(std::vector<double>{2}, std::vector<double>{1}), DomainError);
  // fewer than four points: no verdict
  CHECK(!fit::fit_slope(N, std::vector<double>{1, 2, 3}, 1.0).verdict.has_value());
}

TEST_CASE("spearman and spread") {
  const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 30, 40};
  CHECK(fit::spearman(x, y) == doctest::Approx(1.0));
  CHECK(fit::spearman(x, std::vector<double>{5, 5, 5, 5}) == 0.0);
  CHECK(fit::spread(std::vector<double>{2, 8, 4}) == doctest::Approx(4.0));
}

TEST_CASE("config parsing") {
  const auto cfg = experiments::config_from_json(json::parse(R"({"experiment":"correlation-gap","c":1.1,"N":[4096,8192]})"));
  CHECK(cfg.name == "correlation-gap");
  CHECK(cfg.N->size() == 2);
  CHECK_THROWS_AS(experiments::config_from_json(json::parse(R"({"experiment":"correlation-gap","N":[]})")), ConfigError);
  CHECK_THROWS_AS(experiments::config_from_json(json::parse(R"({"experiment":"correlation-gap","N":[1000]})")), ConfigError);
  CHECK_THROWS_AS(experiments::config_from_json(json::parse(R"({"experiment":"x","bogus":1})")), ConfigError);
  CHECK_THROWS_AS(experiments::resolve(experiments::config_from_json(json::parse(R"({"experiment":"nope"})"))), ConfigError);
  CHECK_THROWS_AS(experiments::config_from_file("/nonexistent/cfg.json"), std::exception);
}

TEST_CASE("correlation-gap end to end") {
  const auto dir = std::filesystem::temp_directory_path() / "sebench_test_gap";
  std::filesystem::remove_all(dir);
  auto cfg = experiments::config_from_json(json::parse(R"({"experiment":"correlation-gap","c":1.1,"N":[4096,8192,16384,32768]})"));
  cfg.out = dir;
  const auto w = experiments::run_experiment(cfg);
  const auto csv = io::read_file(w.csv);
  CHECK(csv.rfind("N,gap_main,gap_small\n", 0) == 0);
  const auto summary = json::parse(io::read_file(w.json));
  CHECK(summary["schema_version"] == experiments::kSummarySchemaVersion);
  CHECK(summary["version"] == std::string(version()));
  CHECK(summary["config"]["c"] == 1.1);
  REQUIRE(summary["fits"].size() == 1);
  CHECK(summary["fits"][0]["name"] == "gap_main");
  CHECK(summary["fits"][0].contains("verdict"));
  // determinism
  const auto again = experiments::run_experiment(cfg);
  CHECK(io::read_file(again.csv) == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("randomized experiments are reproducible from the seed") {
  auto cfg = experiments::config_from_json(json::parse(R"({"experiment":"random-model","seeds":3,"N":[1024,2048,4096,8192]})"));
  const auto a = experiments::compute(cfg).csv();
  CHECK(experiments::compute(cfg).csv() == a);
  const auto before = worker_threads();
  set_worker_threads(3);
  CHECK(experiments::compute(cfg).csv() == a);
  set_worker_threads(before);
  cfg.seed = 2;
  CHECK(experiments::compute(cfg).csv() != a);
}

TEST_CASE("unwritable output path") {
  auto cfg = experiments::config_from_json(json::parse(R"({"experiment":"axioms","trials":5})"));
  cfg.out = "/proc/definitely/not/here";
  CHECK_THROWS(experiments::run_experiment(cfg));
}
